pub mod cidoc;
pub mod eval;
pub mod gedcom;
pub mod graph;
pub mod kinship;
pub mod pipeline;
pub mod qa;
pub mod rng;
pub mod synthetic;
pub mod text;
pub mod traversal;
pub mod tree;
pub mod verbalizer;
