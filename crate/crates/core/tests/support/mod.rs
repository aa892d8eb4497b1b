#![allow(dead_code)]
pub mod oracles;
pub mod problems;
