pub mod analysis;
pub mod cirquent;
pub mod derivation;
pub mod formula;
pub mod game;
pub mod hyper;
pub mod unit;
