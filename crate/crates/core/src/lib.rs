pub mod linalg;
pub mod objects;
pub mod random;
pub mod convex;
pub mod measures;
pub mod power;
pub mod discrimination;
pub mod harness;
