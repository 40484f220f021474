pub mod lang;
pub mod frontend;
pub mod enumerate;
pub mod stats;
pub mod verify;
pub mod synth;
pub mod induct;
pub mod cegis;
pub mod bench;
