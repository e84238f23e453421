pub mod rates;
pub mod solve;
pub mod sweep;
pub mod verify;
