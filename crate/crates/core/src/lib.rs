pub mod cli;
pub mod embedder;
pub mod io;
pub mod topology;
pub mod verifier;
