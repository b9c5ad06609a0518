//! Probabilities in source files may be JSON numbers or decimal strings.

use serde::{Deserialize, Deserializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    F(f64),
    S(String),
}

impl Num {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            Num::F(v) => Ok(v),
            Num::S(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| E::custom(format!("not a decimal number: {s:?}"))),
        }
    }
}

pub fn number<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Num::deserialize(d)?.value()
}

pub fn table<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
    let raw = Vec::<Vec<Num>>::deserialize(d)?;
    raw.into_iter()
        .map(|row| row.into_iter().map(Num::value::<D::Error>).collect())
        .collect()
}
