pub mod casestudy;
pub mod distributions;
pub mod error;
pub mod figures;
pub mod montecarlo;
pub mod report;
pub mod risk;
pub mod supervised;
pub mod tree;
