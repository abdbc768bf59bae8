//! Automatic ground-truth generation for camera-captured document images.
//!
//! A photo of a printed page is matched against a database of electronic
//! pages with locally likely arrangement hashing ([`llah`]), aligned to the
//! retrieved page by a least-squares homography refined with
//! Levenberg-Marquardt ([`geometry`]), and then matched word by word
//! ([`alignment`]) so that word and character crops can be labeled from the
//! page's text layer ([`groundtruth`]). [`eval`] scores OCR output against
//! the generated labels and [`synth`] renders an oracle corpus with exact
//! ground truth for testing all of the above.

pub mod alignment;
pub mod cli;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod groundtruth;
pub mod imaging;
pub mod llah;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
