pub mod algebra;
pub mod ext;
pub mod hom;
pub mod iterated;
pub mod json;
pub mod lifting;
pub mod linalg;
pub mod matrix;
pub mod module;
pub mod par;
pub mod random;
pub mod resolution;
pub mod ring;
