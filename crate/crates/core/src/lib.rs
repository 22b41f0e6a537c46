pub mod cli;
pub mod criteria;
pub mod exppoly;
pub mod gallery;
pub mod graph;
pub mod linalg;
pub mod qgf;
pub mod secular;
pub mod zeros;
