//! The ABC template end to end: validate a parameter set, stream key words,
//! and run the XOR cipher round trip.
//!
//!     cargo run --example abc_cipher

use tflab::bits::BitSeq;
use tflab::ergodic::Oracle;
use tflab::generator::{abc_validate, words_to_bits, xor_cipher, AbcSpec, Generator};

fn main() {
    let oracle = Oracle::default();
    let spec = AbcSpec::template(8);
    println!(
        "template at width 8: register {} cells, taps {:#x}, d = {}, weights {:?}",
        spec.lfsr.cells(),
        spec.lfsr.taps(),
        spec.d,
        spec.dj
    );
    println!("clock update h = {}", spec.update_expr());

    let verdict = abc_validate(&spec, &oracle).unwrap();
    println!("\nvalidation: {}", verdict.to_json());

    let mut g = Generator::abc(&spec, &oracle).unwrap();
    let key_words = g.keystream(40).unwrap();
    println!("\nfirst key words: {:02x?}", &key_words[..12]);

    // encrypt / decrypt round trip
    let message = b"attack at dawn, or maybe brunch";
    let mut data = BitSeq::new();
    for &byte in message {
        data.push_word_bits(byte as u64, 8);
    }
    let key_bits = words_to_bits(&key_words, 8);
    let ciphertext = xor_cipher(&key_bits, &data).unwrap();
    let recovered = xor_cipher(&key_bits, &ciphertext).unwrap();
    let bytes = recovered.to_bytes();
    assert_eq!(&bytes[..message.len()], message);
    println!(
        "cipher round trip over {} bits: recovered \"{}\"",
        data.len(),
        String::from_utf8_lossy(&bytes[..message.len()])
    );

    // the state sequence has period (2^4 - 1) * 2^8 = 3840
    let fresh = Generator::abc(&spec, &oracle).unwrap();
    let start = fresh.state_key();
    let mut walker = fresh.clone();
    let mut steps = 0u64;
    loop {
        walker.next_word().unwrap();
        steps += 1;
        if walker.state_key() == start {
            break;
        }
    }
    println!("state period: {steps} (= 15 * 256)");
}
