use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Bits;
use crate::error::{Error, Result};

/// Largest block length for exhaustive distance and coset computations.
pub const MAX_CODE_LEN: usize = 24;

/// Binary `[n, k, d]` code given by a full-rank generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: Vec<Bits>,
    parity: Vec<Bits>,
    /// Columns of `x` that carry the free coordinates of a syndrome solution.
    syndrome_columns: Vec<usize>,
    d: usize,
}

impl LinearCode {
    pub fn from_generator(n: usize, rows: Vec<Bits>) -> Result<Self> {
        if n == 0 || n > MAX_CODE_LEN {
            return Err(Error::Input(format!("code length {n} outside 1..={MAX_CODE_LEN}")));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("generator rows must have length {n}")));
        }
        let k = rows.len();
        let (rref, pivots) = rref(&rows, n);
        if pivots.len() != k {
            return Err(Error::Input(format!("generator has rank {} < {k}", pivots.len())));
        }
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        // H row for free column j: e_j plus the pivot columns whose RREF row has a 1 in j.
        let parity: Vec<Bits> = free
            .iter()
            .map(|&j| {
                let mut h = Bits::zeros(n).with(j, true);
                for (row, &p) in rref.iter().zip(&pivots) {
                    if row.get(j) {
                        h = h.with(p, true);
                    }
                }
                h
            })
            .collect();
        let mut code = Self {
            n,
            k,
            generator: rows,
            parity,
            syndrome_columns: free,
            d: 0,
        };
        debug_assert!(code.generator.iter().all(|g| code.parity.iter().all(|h| !g.dot(h))));
        code.d = code.brute_force_distance();
        Ok(code)
    }

    pub fn from_strings(rows: &[&str]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.parse()).collect::<Result<Vec<Bits>>>()?;
        let n = rows.first().map_or(0, Bits::len);
        Self::from_generator(n, rows)
    }

    pub fn repetition(n: usize) -> Result<Self> {
        let all_ones = Bits::new(n, if n == 64 { u64::MAX } else { (1u64 << n) - 1 })?;
        Self::from_generator(n, vec![all_ones])
    }

    /// The `[7, 4, 3]` Hamming code in systematic form.
    pub fn hamming74() -> Self {
        Self::from_strings(&["1000110", "0100011", "0010111", "0001101"]).expect("fixed generator is valid")
    }

    /// Uniformly random full-rank `k × n` generator.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k > n {
            return Err(Error::Input(format!("k = {k} exceeds n = {n}")));
        }
        loop {
            let rows: Vec<Bits> = (0..k)
                .map(|_| Bits::new(n, rng.random::<u64>() & low_mask(n)))
                .collect::<Result<_>>()?;
            if rref(&rows, n).1.len() == k {
                return Self::from_generator(n, rows);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generator(&self) -> &[Bits] {
        &self.generator
    }

    pub fn parity(&self) -> &[Bits] {
        &self.parity
    }

    pub fn encode(&self, message: &Bits) -> Bits {
        self.generator
            .iter()
            .enumerate()
            .filter(|(i, _)| message.get(*i))
            .fold(Bits::zeros(self.n), |acc, (_, g)| acc.xor(g))
    }

    /// All `2^k` codewords in message-mask order.
    pub fn codewords(&self) -> impl Iterator<Item = Bits> + '_ {
        Bits::all(self.k).map(|m| self.encode(&m))
    }

    pub fn contains(&self, x: &Bits) -> bool {
        self.parity.iter().all(|h| !h.dot(x))
    }

    pub fn syndrome(&self, x: &Bits) -> Result<Bits> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "string of length {} for a code of length {}",
                x.len(),
                self.n
            )));
        }
        let bools: Vec<bool> = self.parity.iter().map(|h| h.dot(x)).collect();
        Bits::from_bools(&bools)
    }

    /// Some string whose syndrome is `s`.
    pub fn coset_leader_any(&self, s: &Bits) -> Result<Bits> {
        if s.len() != self.n - self.k {
            return Err(Error::DimensionMismatch(format!(
                "syndrome of length {} for n − k = {}",
                s.len(),
                self.n - self.k
            )));
        }
        // Each free column appears in exactly one parity row.
        let mut x = Bits::zeros(self.n);
        for (i, &j) in self.syndrome_columns.iter().enumerate() {
            if s.get(i) {
                x = x.with(j, true);
            }
        }
        Ok(x)
    }

    /// The coset `{x : Hx = s}`.
    pub fn coset(&self, s: &Bits) -> Result<Vec<Bits>> {
        let x0 = self.coset_leader_any(s)?;
        Ok(self.codewords().map(|c| c.xor(&x0)).collect())
    }

    /// Closest string to `reference` with syndrome `s`; ties go to the
    /// lexicographically smallest string.
    pub fn nearest_coset_rep(&self, s: &Bits, reference: &Bits) -> Result<Bits> {
        if reference.len() != self.n {
            return Err(Error::DimensionMismatch("reference length differs from n".into()));
        }
        let best = self
            .coset(s)?
            .into_iter()
            .min_by_key(|x| (x.distance(reference), x.lex_key()))
            .expect("cosets are non-empty");
        Ok(best)
    }

    fn brute_force_distance(&self) -> usize {
        if self.k == 0 {
            return self.n + 1;
        }
        self.codewords()
            .skip(1)
            .map(|c| c.weight() as usize)
            .min()
            .unwrap_or(self.n)
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Reduced row echelon form over GF(2); returns the non-zero rows and their
/// pivot columns.
fn rref(rows: &[Bits], n: usize) -> (Vec<Bits>, Vec<usize>) {
    let mut m: Vec<Bits> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i].get(col)) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r];
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(col) {
                *row = row.xor(&pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// JSON form: `{"n": 7, "k": 4, "G": ["1000110", ...], "d": 3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "G")]
    pub generator: Vec<Bits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

impl CodeFile {
    pub fn from_code(code: &LinearCode) -> Self {
        Self {
            n: code.n,
            k: code.k,
            generator: code.generator.clone(),
            d: Some(code.d),
        }
    }

    /// Recomputes `d` and checks it against the stored value.
    pub fn to_code(&self) -> Result<LinearCode> {
        if self.generator.len() != self.k {
            return Err(Error::Input(format!(
                "k = {} but {} generator rows",
                self.k,
                self.generator.len()
            )));
        }
        let code = LinearCode::from_generator(self.n, self.generator.clone())?;
        if let Some(d) = self.d {
            if d != code.d {
                return Err(Error::Input(format!("stored d = {d}, computed d = {}", code.d)));
            }
        }
        Ok(code)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::seeded;

    #[test]
    fn named_codes() {
        let rep = LinearCode::repetition(3).unwrap();
        assert_eq!((rep.n(), rep.k(), rep.d()), (3, 1, 3));
        let ham = LinearCode::hamming74();
        assert_eq!((ham.n(), ham.k(), ham.d()), (7, 4, 3));
        for g in ham.generator() {
            for h in ham.parity() {
                assert!(!g.dot(h));
            }
        }
    }

    #[test]
    fn repetition_coset_example() {
        let rep = LinearCode::repetition(3).unwrap();
        let flip: Bits = "001".parse().unwrap();
        let s = rep.syndrome(&flip).unwrap();
        let rep_x = rep.nearest_coset_rep(&s, &Bits::zeros(3)).unwrap();
        assert_eq!(rep_x.to_string(), "001");
        let listing: Vec<String> = Bits::all(3)
            .filter(|x| rep.syndrome(x).unwrap() == s)
            .map(|x| x.to_string())
            .collect();
        let mut coset: Vec<String> = rep.coset(&s).unwrap().iter().map(Bits::to_string).collect();
        coset.sort();
        let mut listing = listing;
        listing.sort();
        assert_eq!(coset, listing);
    }

    #[test]
    fn reference_in_coset_is_returned() {
        let ham = LinearCode::hamming74();
        for x in Bits::all(7).step_by(5) {
            let s = ham.syndrome(&x).unwrap();
            assert_eq!(ham.nearest_coset_rep(&s, &x).unwrap(), x);
        }
    }

    #[test]
    fn ties_break_lexicographically() {
        let rep = LinearCode::repetition(4).unwrap();
        let x: Bits = "1100".parse().unwrap();
        let s = rep.syndrome(&x).unwrap();
        // Coset {1100, 0011}; reference 0000 is equidistant (2 and 2).
        let best = rep.nearest_coset_rep(&s, &Bits::zeros(4)).unwrap();
        assert_eq!(best.to_string(), "0011");
    }

    #[test]
    fn rejects_dependent_rows_and_bad_files() {
        assert!(LinearCode::from_strings(&["110", "110"]).is_err());
        let mut file = CodeFile::from_code(&LinearCode::hamming74());
        let text = file.to_json().unwrap();
        assert_eq!(
            CodeFile::from_json(&text).unwrap().to_code().unwrap(),
            LinearCode::hamming74()
        );
        file.d = Some(4);
        assert!(file.to_code().is_err());
    }

    #[test]
    fn random_codes_are_consistent() {
        let mut rng = seeded(9);
        for _ in 0..10 {
            let code = LinearCode::random(10, 5, &mut rng).unwrap();
            assert!(code.codewords().all(|c| code.contains(&c)));
            let weight_oracle = Bits::all(10)
                .filter(|x| x.weight() > 0 && code.contains(x))
                .map(|x| x.weight() as usize)
                .min()
                .unwrap();
            assert_eq!(weight_oracle, code.d());
        }
    }
}
