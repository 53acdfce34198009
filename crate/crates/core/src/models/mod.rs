pub mod ce;
pub mod corpus;
pub mod description;
pub mod perturb;
