pub mod band;
pub mod gumbel;
pub mod mc_sup;
pub mod simulate;
pub mod smalltime;
pub mod tails;
