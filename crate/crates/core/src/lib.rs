pub mod bench;
pub mod digraph;
pub mod flow;
pub mod homology;
pub mod linalg;
pub mod morse;
pub mod path;
