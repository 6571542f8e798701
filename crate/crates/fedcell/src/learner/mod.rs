//! The federated learning workload: datasets, partitioning, and a
//! one-hidden-layer MLP trained with mini-batch SGD and aggregated by
//! unweighted model averaging.

mod data;
mod idx;
mod mlp;

pub use data::{make_synthetic, partition, Dataset, PartitionMode, PartitionSpec};
pub use idx::{load_idx, IMAGES_MAGIC, LABELS_MAGIC};
pub use mlp::{
    aggregate, evaluate, grad, init_model, local_update, loss, model_size_bits, MlpShape,
    ModelParams, HIDDEN_DIM, INPUT_DIM, NUM_CLASSES,
};
