//! Exact construction and verification of 1-shifted Lie bialgebras, Manin
//! triples, their r-matrices and quantizations, Koszul complexes and
//! truncated loop doubles.

pub mod bialg;
pub mod cli;
pub mod exactnum;
pub mod graded;
pub mod koszul;
pub mod liealg;
pub mod loopyang;
pub mod report;
pub mod rmat;
pub mod uea;
