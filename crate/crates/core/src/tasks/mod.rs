//! Classical, entanglement-assisted and quantum communication models.

mod model;
mod spec;

pub use model::{
    build_classical_model, build_ea_model, build_model, build_pooling_layer, build_quantum_model,
    conditional_distribution, ghz_state, ghz_vector, Model, ModelParameters, ParamLayout, Program,
};
pub use spec::{Message, Setting, TaskSpec, DEFAULT_ENTANGLER_LAYERS, DEFAULT_LAYERS};
