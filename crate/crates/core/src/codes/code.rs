use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bits::{is_prefix_free, BitString};
use crate::error::{Error, Result};
use crate::funclass::VectorFunction;
use crate::sources::SourceModel;
use crate::words::{Budget, WordSpace};

/// A block code for computing a function: two prefix-free encoders and a
/// table decoder. Decoder outputs are label ids of the target function;
/// `None` means the decoder declares an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributedCode {
    pub n: usize,
    pub x_size: usize,
    pub y_size: usize,
    pub codebook1: Vec<BitString>,
    pub codebook2: Vec<BitString>,
    /// Codeword index for each x-word index.
    pub enc1: Vec<u32>,
    /// Codeword index for each y-word index.
    pub enc2: Vec<u32>,
    /// Output for codeword pair `(c1, c2)` at `c1 * codebook2.len() + c2`.
    pub decoder: Vec<Option<u32>>,
}

/// Collapse per-word codewords to a codebook plus an index map.
pub fn index_codewords(words: Vec<BitString>) -> (Vec<BitString>, Vec<u32>) {
    let mut ids: HashMap<BitString, u32> = HashMap::new();
    let mut book = Vec::new();
    let enc = words
        .into_iter()
        .map(|w| {
            let next = book.len() as u32;
            *ids.entry(w.clone()).or_insert_with(|| {
                book.push(w);
                next
            })
        })
        .collect();
    (book, enc)
}

impl DistributedCode {
    /// Assemble a code from per-word codewords and a decoding rule on codeword indices.
    pub fn from_parts(
        n: usize,
        x_size: usize,
        y_size: usize,
        words1: Vec<BitString>,
        words2: Vec<BitString>,
        mut decode: impl FnMut(u32, u32) -> Option<u32>,
    ) -> Result<Self> {
        let (codebook1, enc1) = index_codewords(words1);
        let (codebook2, enc2) = index_codewords(words2);
        let mut decoder = Vec::with_capacity(codebook1.len() * codebook2.len());
        for c1 in 0..codebook1.len() as u32 {
            for c2 in 0..codebook2.len() as u32 {
                decoder.push(decode(c1, c2));
            }
        }
        let code = DistributedCode {
            n,
            x_size,
            y_size,
            codebook1,
            codebook2,
            enc1,
            enc2,
            decoder,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn validate(&self) -> Result<()> {
        let nx = WordSpace::new(self.x_size, self.n).count()?;
        let ny = WordSpace::new(self.y_size, self.n).count()?;
        if self.enc1.len() != nx || self.enc2.len() != ny {
            return Err(Error::InvalidTable(
                "encoder tables do not cover every word".into(),
            ));
        }
        if self
            .enc1
            .iter()
            .any(|&c| c as usize >= self.codebook1.len())
            || self
                .enc2
                .iter()
                .any(|&c| c as usize >= self.codebook2.len())
        {
            return Err(Error::InvalidTable(
                "encoder refers to a missing codeword".into(),
            ));
        }
        if self.decoder.len() != self.codebook1.len() * self.codebook2.len() {
            return Err(Error::InvalidTable(
                "decoder table has the wrong size".into(),
            ));
        }
        if !is_prefix_free(&self.codebook1) || !is_prefix_free(&self.codebook2) {
            return Err(Error::InvalidTable("encoders must be prefix-free".into()));
        }
        Ok(())
    }

    pub fn len1(&self, x: usize) -> usize {
        self.codebook1[self.enc1[x] as usize].len()
    }

    pub fn len2(&self, y: usize) -> usize {
        self.codebook2[self.enc2[y] as usize].len()
    }

    pub fn lengths1(&self) -> Vec<usize> {
        (0..self.enc1.len()).map(|x| self.len1(x)).collect()
    }

    pub fn lengths2(&self) -> Vec<usize> {
        (0..self.enc2.len()).map(|y| self.len2(y)).collect()
    }

    pub fn decode_indices(&self, c1: u32, c2: u32) -> Option<u32> {
        self.decoder[c1 as usize * self.codebook2.len() + c2 as usize]
    }

    /// Decoder output for word indices.
    #[inline]
    pub fn output(&self, x: usize, y: usize) -> Option<u32> {
        self.decode_indices(self.enc1[x], self.enc2[y])
    }

    /// Decode from the transmitted bit strings.
    pub fn decode(&self, w1: &BitString, w2: &BitString) -> Result<Option<u32>> {
        let c1 = self.codebook1.iter().position(|c| c == w1);
        let c2 = self.codebook2.iter().position(|c| c == w2);
        match (c1, c2) {
            (Some(a), Some(b)) => Ok(self.decode_indices(a as u32, b as u32)),
            _ => Err(Error::Decode("received string is not a codeword".into())),
        }
    }

    /// Equivalent code with every codeword of length between 1 and
    /// `1 + n ceil(log2 |alphabet|)`: a flag bit, then either the old codeword
    /// or the raw word index, whichever is shorter. Every pair decodes to the
    /// same output as before, so the error probability is unchanged.
    pub fn with_flagged_lengths(&self) -> Result<Self> {
        fn side(
            book: &[BitString],
            enc: &[u32],
            alphabet: usize,
            n: usize,
        ) -> (Vec<BitString>, Vec<u32>) {
            let raw = n * (usize::BITS - (alphabet.max(1) - 1).leading_zeros()) as usize;
            let words: Vec<BitString> = enc
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let old = &book[c as usize];
                    let mut w = BitString::new();
                    if old.len() <= raw {
                        w.push(false);
                        w.extend(old);
                    } else {
                        w.push(true);
                        w.extend(&BitString::from_uint(i as u64, raw));
                    }
                    w
                })
                .collect();
            let (_, new_enc) = index_codewords(words.clone());
            // Old codeword index behind each new codeword index.
            let mut back = vec![0u32; new_enc.iter().map(|&c| c as usize + 1).max().unwrap_or(0)];
            for (i, &c) in new_enc.iter().enumerate() {
                back[c as usize] = enc[i];
            }
            (words, back)
        }
        let (w1, back1) = side(&self.codebook1, &self.enc1, self.x_size, self.n);
        let (w2, back2) = side(&self.codebook2, &self.enc2, self.y_size, self.n);
        DistributedCode::from_parts(self.n, self.x_size, self.y_size, w1, w2, |c1, c2| {
            self.decode_indices(back1[c1 as usize], back2[c2 as usize])
        })
    }

    /// Whether the second encoder is injective, i.e. the decoder sees y.
    pub fn has_full_side_information(&self) -> bool {
        let mut seen = vec![false; self.codebook2.len()];
        self.enc2
            .iter()
            .all(|&c| !std::mem::replace(&mut seen[c as usize], true))
    }
}

/// Fixed-length binary index of `i` among `count` items.
pub fn fixed_length_index(i: usize, count: usize) -> BitString {
    let width = if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    };
    BitString::from_uint(i as u64, width)
}

/// A random complete prefix-free code with `k` codewords, grown by
/// splitting random leaves.
pub fn random_prefix_code<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<BitString> {
    let mut leaves = vec![BitString::new()];
    while leaves.len() < k {
        let i = rng.gen_range(0..leaves.len());
        let w = leaves.swap_remove(i);
        let mut a = w.clone();
        a.push(false);
        let mut b = w;
        b.push(true);
        leaves.push(a);
        leaves.push(b);
    }
    leaves.sort();
    leaves
}

/// Maximum a posteriori decoder table for given encoders.
pub fn map_decoder(
    f: &VectorFunction,
    p: &[f64],
    enc1: &[u32],
    k1: usize,
    enc2: &[u32],
    k2: usize,
) -> Vec<Option<u32>> {
    let ny = f.num_y();
    let mut mass: Vec<HashMap<u32, f64>> = vec![HashMap::new(); k1 * k2];
    for (x, &c1) in enc1.iter().enumerate() {
        for (y, &c2) in enc2.iter().enumerate() {
            *mass[c1 as usize * k2 + c2 as usize]
                .entry(f.at(x, y))
                .or_insert(0.0) += p[x * ny + y];
        }
    }
    mass.into_iter()
        .map(|m| {
            m.into_iter()
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(z, _)| z)
        })
        .collect()
}

/// Options for [`random_code`].
#[derive(Debug, Clone, Copy)]
pub struct RandomCodeOptions {
    /// Probability that a decoder cell uses the MAP label instead of a random one.
    pub map_fraction: f64,
    /// Make the second encoder injective with fixed-length indices.
    pub full_side_information: bool,
}

impl Default for RandomCodeOptions {
    fn default() -> Self {
        RandomCodeOptions {
            map_fraction: 0.8,
            full_side_information: false,
        }
    }
}

pub(crate) fn check_alphabets(f: &VectorFunction, source: &SourceModel) -> Result<()> {
    if f.x_size() != source.x_size() || f.y_size() != source.y_size() {
        return Err(Error::invalid(format!(
            "function alphabets {}x{} differ from source alphabets {}x{}",
            f.x_size(),
            f.y_size(),
            source.x_size(),
            source.y_size()
        )));
    }
    Ok(())
}

/// A random prefix-free code for `f`, used to exercise bounds that hold for
/// every code.
pub fn random_code<R: Rng + ?Sized>(
    f: &VectorFunction,
    source: &SourceModel,
    opts: RandomCodeOptions,
    budget: Budget,
    rng: &mut R,
) -> Result<DistributedCode> {
    check_alphabets(f, source)?;
    let (nx, ny) = (f.num_x(), f.num_y());
    let p = crate::sources::pmf_table(source, f.n(), budget)?;
    let k1 = rng.gen_range(1..=nx);
    let enc1: Vec<u32> = (0..nx).map(|_| rng.gen_range(0..k1 as u32)).collect();
    let (k2, enc2): (usize, Vec<u32>) = if opts.full_side_information {
        (ny, (0..ny as u32).collect())
    } else {
        let k2 = rng.gen_range(1..=ny);
        (k2, (0..ny).map(|_| rng.gen_range(0..k2 as u32)).collect())
    };
    let book1 = random_prefix_code(k1, rng);
    let book2: Vec<BitString> = if opts.full_side_information {
        (0..ny).map(|i| fixed_length_index(i, ny)).collect()
    } else {
        random_prefix_code(k2, rng)
    };
    let map = map_decoder(f, &p, &enc1, k1, &enc2, k2);
    let labels = f.num_labels() as u32;
    let table: Vec<Option<u32>> = map
        .into_iter()
        .map(|z| {
            if rng.gen::<f64>() < opts.map_fraction {
                z
            } else {
                Some(rng.gen_range(0..labels))
            }
        })
        .collect();
    let words1 = enc1.iter().map(|&c| book1[c as usize].clone()).collect();
    let words2 = enc2.iter().map(|&c| book2[c as usize].clone()).collect();
    // Codeword indices are renumbered by first appearance; map back through the words.
    let mut code =
        DistributedCode::from_parts(f.n(), f.x_size(), f.y_size(), words1, words2, |_, _| None)?;
    for x in 0..nx {
        for y in 0..ny {
            let cell = code.enc1[x] as usize * code.codebook2.len() + code.enc2[y] as usize;
            code.decoder[cell] = table[enc1[x] as usize * k2 + enc2[y] as usize];
        }
    }
    Ok(code)
}

/// Fixed-length binning code of `bits` bits for x, with the decoder seeing y
/// and choosing the most probable x in the received bin.
pub fn binning_side_information_code<R: Rng + ?Sized>(
    f: &VectorFunction,
    source: &SourceModel,
    bits: usize,
    budget: Budget,
    rng: &mut R,
) -> Result<DistributedCode> {
    check_alphabets(f, source)?;
    let (nx, ny) = (f.num_x(), f.num_y());
    let p = crate::sources::pmf_table(source, f.n(), budget)?;
    let injective = bits < 64 && (1u64 << bits) >= nx as u64;
    let words1: Vec<BitString> = (0..nx)
        .map(|x| {
            if injective {
                BitString::from_uint(x as u64, bits)
            } else {
                BitString((0..bits).map(|_| rng.gen::<bool>()).collect())
            }
        })
        .collect();
    let words2: Vec<BitString> = (0..ny).map(|y| fixed_length_index(y, ny)).collect();
    let (book1, enc1) = index_codewords(words1.clone());
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); book1.len()];
    for (x, &c) in enc1.iter().enumerate() {
        members[c as usize].push(x);
    }
    DistributedCode::from_parts(f.n(), f.x_size(), f.y_size(), words1, words2, |c1, y| {
        let y = y as usize;
        members[c1 as usize]
            .iter()
            .copied()
            .max_by(|&a, &b| p[a * ny + y].total_cmp(&p[b * ny + y]).then(b.cmp(&a)))
            .map(|x| f.at(x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::bits::kraft_sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_prefix_codes_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..20 {
            let c = random_prefix_code(k, &mut rng);
            assert_eq!(c.len(), k);
            assert!(is_prefix_free(&c));
            assert!((kraft_sum(&c) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_code_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = VectorFunction::identity(2, 2, 2, Budget::default()).unwrap();
        let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        for _ in 0..20 {
            let c = random_code(
                &f,
                &s,
                RandomCodeOptions::default(),
                Budget::default(),
                &mut rng,
            )
            .unwrap();
            c.validate().unwrap();
            for x in 0..4 {
                for y in 0..4 {
                    let w1 = &c.codebook1[c.enc1[x] as usize];
                    let w2 = &c.codebook2[c.enc2[y] as usize];
                    assert_eq!(c.decode(w1, w2).unwrap(), c.output(x, y));
                }
            }
        }
    }

    #[test]
    fn flagged_lengths_keep_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = VectorFunction::identity(3, 2, 2, Budget::default()).unwrap();
        let s = SourceModel::iid(vec![vec![0.2, 0.1], vec![0.1, 0.3], vec![0.2, 0.1]]).unwrap();
        for _ in 0..20 {
            let c = random_code(
                &f,
                &s,
                RandomCodeOptions::default(),
                Budget::default(),
                &mut rng,
            )
            .unwrap();
            let g = c.with_flagged_lengths().unwrap();
            for x in 0..9 {
                assert!((1..=5).contains(&g.len1(x)));
                assert!(g.len1(x) <= c.len1(x) + 1);
                for y in 0..4 {
                    assert!((1..=3).contains(&g.len2(y)));
                    assert_eq!(g.output(x, y), c.output(x, y));
                }
            }
        }
    }

    #[test]
    fn injective_binning_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = VectorFunction::identity(2, 2, 2, Budget::default()).unwrap();
        let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let c = binning_side_information_code(&f, &s, 2, Budget::default(), &mut rng).unwrap();
        assert!(c.has_full_side_information());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(c.output(x, y), Some(f.at(x, y)));
            }
        }
    }

    #[test]
    fn fixed_length_indices() {
        assert_eq!(fixed_length_index(0, 1).len(), 0);
        assert_eq!(fixed_length_index(3, 4).to_string(), "11");
        assert_eq!(fixed_length_index(4, 5).to_string(), "100");
    }
}
