pub mod catalog;
pub mod determining;
pub mod diffop;
pub mod equiv;
pub mod expr;
pub mod liealg;
pub mod numoracle;
