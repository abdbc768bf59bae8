//! Run the whole pipeline on a synthetic corpus held in memory and score
//! the emitted labels against the renderer's ground truth.
//!
//! cargo run --example oracle_pipeline -- [pages] [captures_per_page]

use std::sync::Arc;
use std::time::Instant;

use camgt::geometry::{transfer_error, Point, Rect};
use camgt::groundtruth::RecordKind;
use camgt::llah::{LlahParams, StoreBuilder};
use camgt::pipeline::{process_capture, CaptureStatus, PageData, PipelineParams};
use camgt::synth::{simulate_capture, CorpusSpec};
use rayon::prelude::*;

fn main() -> camgt::Result<()> {
    let mut args = std::env::args().skip(1);
    let pages: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let per_page: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let corpus = CorpusSpec { seed: 99, pages, captures_per_page: per_page, ..Default::default() };

    let t = Instant::now();
    let rendered: Vec<_> = (0..pages).into_par_iter().map(|i| corpus.render(i)).collect::<camgt::Result<_>>()?;
    let params = LlahParams::default();
    let prepared: Vec<_> = rendered
        .par_iter()
        .map(|(img, _)| StoreBuilder::prepare_page(img, &params))
        .collect::<camgt::Result<_>>()?;
    let mut builder = StoreBuilder::new(params)?;
    for (i, p) in prepared.into_iter().enumerate() {
        builder.insert_prepared(i as u32, p);
    }
    let store = builder.finish();
    let page_data: Vec<PageData> = rendered
        .iter()
        .enumerate()
        .map(|(i, (img, layer))| PageData {
            page_id: camgt::synth::page_id(i),
            image: Arc::new(img.clone()),
            layer: Arc::new(layer.clone()),
        })
        .collect();
    println!("corpus and index ready in {:.1?}", t.elapsed());

    let t = Instant::now();
    let pp = PipelineParams::default();
    let results: Vec<_> = (0..pages * per_page)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / per_page, k % per_page);
            let (cap, h_true) = simulate_capture(&rendered[i].0, &corpus.capture_spec(i, j)).unwrap();
            let out = process_capture(&camgt::synth::capture_id(i, j), &cap, &store, &page_data, &pp);
            (i, cap.width(), cap.height(), h_true, out)
        })
        .collect();
    println!("{} captures processed in {:.1?}", results.len(), t.elapsed());

    let (mut words, mut correct, mut chars, mut failed) = (0usize, 0usize, 0usize, 0usize);
    let mut transfer = Vec::new();
    for (i, w, h, h_true, out) in &results {
        if out.log.status != CaptureStatus::Ok || out.log.doc_id != Some(*i as u32) {
            failed += 1;
            println!("capture failed: {:?}", out.log);
            continue;
        }
        let h_est = out.log.homography.unwrap();
        let corners = [Point::new(0.0, 0.0), Point::new(*w as f64, 0.0), Point::new(*w as f64, *h as f64), Point::new(0.0, *h as f64)];
        transfer.push(transfer_error(&h_est, h_true, &corners));
        // Page position of the record content under the true geometry.
        let to_true = *h_true * h_est.inverse()?;
        let layer = &rendered[*i].1;
        for r in &out.records {
            if r.kind == RecordKind::Char {
                chars += 1;
                continue;
            }
            words += 1;
            let c: Vec<Point> = r.norm_bbox.corners().iter().map(|p| to_true.project(p).unwrap()).collect();
            let true_box = Rect::bounding(&c).unwrap();
            let best = layer.words.iter().max_by(|a, b| a.bbox.iou(&true_box).total_cmp(&b.bbox.iou(&true_box))).unwrap();
            if best.text == r.text {
                correct += 1;
            } else {
                println!("mislabel {}: {:?} vs truth {:?}", r.record_id(), r.text, best.text);
            }
        }
    }
    transfer.sort_by(f64::total_cmp);
    println!(
        "word records {words}, correct {correct} ({:.3}%), char records {chars}, failed captures {failed}",
        100.0 * correct as f64 / words.max(1) as f64
    );
    if !transfer.is_empty() {
        println!("corner transfer error median {:.3} px, max {:.3} px", transfer[transfer.len() / 2], transfer.last().unwrap());
    }
    Ok(())
}
