//! The bundled English-French toy data and the models trained from it.

use reltrans_core::{MonolingualModel, TransferModel};

use crate::formats::parse_model;

pub const TOY_BITEXT: &str = include_str!("../data/toy.bitext");
pub const TOY_EN_CORPUS: &str = include_str!("../data/toy.en.corpus");
pub const TOY_FR_CORPUS: &str = include_str!("../data/toy.fr.corpus");
pub const TOY_NBEST: &str = include_str!("../data/toy.nbest");
pub const TOY_EN_MODEL: &str = include_str!("../data/toy.en.model");
pub const TOY_FR_MODEL: &str = include_str!("../data/toy.fr.model");
pub const TOY_EN_FR_MODEL: &str = include_str!("../data/toy.en-fr.model");
pub const TOY_FR_EN_MODEL: &str = include_str!("../data/toy.fr-en.model");

/// Every bundled model file by name.
pub const MODEL_FILES: [(&str, &str); 4] = [
    ("toy.en.model", TOY_EN_MODEL),
    ("toy.fr.model", TOY_FR_MODEL),
    ("toy.en-fr.model", TOY_EN_FR_MODEL),
    ("toy.fr-en.model", TOY_FR_EN_MODEL),
];

/// The trained toy models.
#[derive(Debug, Clone)]
pub struct ToyModels {
    pub english: MonolingualModel,
    pub french: MonolingualModel,
    pub forward: TransferModel,
    pub reverse: TransferModel,
}

pub fn toy_models() -> ToyModels {
    let load = |name, text| parse_model(text, name).expect("bundled model parses");
    ToyModels {
        english: load("toy.en.model", TOY_EN_MODEL).lm,
        french: load("toy.fr.model", TOY_FR_MODEL).lm,
        forward: load("toy.en-fr.model", TOY_EN_FR_MODEL).tm,
        reverse: load("toy.fr-en.model", TOY_FR_EN_MODEL).tm,
    }
}
