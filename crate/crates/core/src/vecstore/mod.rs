//! Id-aligned float matrices, their binary codec, and exact cosine kNN.

pub mod codec;
mod knn;
mod sets;

pub use codec::{MatrixKind, RawMatrix};
pub use knn::{cosine, knn, knn_batch, Neighbor, NeighborList};
pub use sets::{
    read_embeddings, read_matrix, read_predictions, write_embeddings, write_matrix, write_predictions, EmbeddingSet,
    MatrixSet, PredictionSet, PROB_SUM_TOLERANCE,
};
