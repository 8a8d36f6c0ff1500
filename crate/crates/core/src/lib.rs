pub mod error;
pub mod families;
pub mod numeric;
pub mod pd;
pub mod quad;
pub mod series;
pub mod moments;
pub mod samplers;
pub mod intensity;
pub mod stats;
pub mod verify;
pub mod cli;
