pub mod cohpart;
pub mod degen;
pub mod dimsolve;
pub mod form;
pub mod geomcat;
pub mod qlaurent;
