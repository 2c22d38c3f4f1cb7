#![allow(dead_code)]

pub mod agreement;
pub mod fixtures;
pub mod formulas;
pub mod grid;
pub mod ltl3;
