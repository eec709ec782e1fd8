pub mod checks;
pub mod cli;
pub mod curve;
pub mod elliptic;
pub mod numerics;
pub mod pstability;
pub mod sheaf;
pub mod surface;
