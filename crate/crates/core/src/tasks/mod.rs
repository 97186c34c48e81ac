//! Problem builders for deblurring, inpainting and rain removal.

mod deblur;
mod derain;
mod inpaint;

pub use deblur::build_deblur;
pub use derain::{
    derain_gate_r, derain_solve, derain_step, DerainModel, DerainParams, DerainState,
};
pub use inpaint::build_inpaint;
