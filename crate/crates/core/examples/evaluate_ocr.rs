//! Edit-distance accuracy of OCR strings, and a corpus benchmark when given
//! a dataset directory and a `record_id<TAB>text` hypothesis file.
//!
//! cargo run --example evaluate_ocr -- [dataset_dir hyp.tsv]

use std::path::Path;

use camgt::eval::{accuracy, benchmark, edit_counts};

fn main() -> camgt::Result<()> {
    for (gt, hyp) in [("votes", "voes"), ("recognition", "recoqnltion"), ("the", "")] {
        let c = edit_counts(gt, hyp);
        println!(
            "{gt:>12} vs {hyp:<12} ins {} del {} sub {} -> {:.1}%",
            c.insertions,
            c.deletions,
            c.substitutions,
            accuracy(gt, hyp)?
        );
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [dataset, hyp] = args.as_slice() {
        print!("{}", benchmark(Path::new(dataset), Path::new(hyp))?.table());
    }
    Ok(())
}
