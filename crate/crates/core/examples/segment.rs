//! Sentence segmentation with char and byte offsets.
//!
//!     cargo run --example segment -- "Some text. More text!"

use risk_evidence::corpus::Segmenter;

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| {
        "I can\u{2019}t sleep again... Nobody cares: I want to die. 3.5 hours left".into()
    });

    for (name, seg) in [
        ("default", Segmenter::new()),
        ("with commas", Segmenter::new().with_comma_boundaries(true)),
    ] {
        println!("{name}:");
        for span in seg.spans(&text) {
            println!(
                "  chars {:>3}..{:<3} bytes {:>3}..{:<3} {:?}",
                span.char_start,
                span.char_end,
                span.byte_start,
                span.byte_end,
                span.slice(&text)
            );
        }
    }
}
