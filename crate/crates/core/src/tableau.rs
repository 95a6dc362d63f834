//! Stabilizer tableau with signs, used as a noiseless reference simulator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{CliffordLayer, Gate, Pauli, PauliString, Qubit};

#[derive(Clone, Debug)]
pub enum TableauOp {
    ResetZ(Qubit),
    ResetX(Qubit),
    Layer(CliffordLayer),
    MeasureZ(Qubit),
    MeasureX(Qubit),
    /// Measures a Pauli product and records the outcome.
    MeasurePauli(PauliString),
    /// Projects onto the given eigenvalue of a Pauli product; no record.
    Postselect(PauliString, bool),
    /// Applies a Pauli operator (used to inject errors).
    Apply(PauliString),
}

#[derive(Clone)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    r: bool,
}

impl Row {
    fn zero(words: usize) -> Row {
        Row {
            x: vec![0; words],
            z: vec![0; words],
            r: false,
        }
    }
    fn get(&self, q: usize) -> (bool, bool) {
        (
            self.x[q / 64] >> (q % 64) & 1 == 1,
            self.z[q / 64] >> (q % 64) & 1 == 1,
        )
    }
    fn set(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[w] |= b
        } else {
            self.x[w] &= !b
        }
        if z {
            self.z[w] |= b
        } else {
            self.z[w] &= !b
        }
    }
    fn from_pauli(words: usize, p: &PauliString) -> Row {
        let mut r = Row::zero(words);
        for (q, pq) in p.iter() {
            let (x, z) = pq.bits();
            r.set(q as usize, x, z);
        }
        r
    }
    fn anticommutes(&self, p: &PauliString) -> bool {
        let mut a = false;
        for (q, pq) in p.iter() {
            let (x, z) = self.get(q as usize);
            let (px, pz) = pq.bits();
            a ^= (x & pz) ^ (z & px);
        }
        a
    }
}

/// Aaronson-Gottesman tableau over `n` qubits initialised to |0…0⟩.
#[derive(Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    rows: Vec<Row>,
}

fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i32 - x2 as i32,
        (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
        (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
    }
}

impl Tableau {
    pub fn new(n: usize) -> Tableau {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![Row::zero(words); 2 * n];
        for i in 0..n {
            rows[i].set(i, true, false);
            rows[n + i].set(i, false, true);
        }
        Tableau { n, words, rows }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, q: Qubit) -> Result<usize> {
        let q = q as usize;
        if q >= self.n {
            return Err(Error::Program(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(q)
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        for (q, _) in p.iter() {
            self.check(q)?;
        }
        Ok(())
    }

    /// rows[h] <- rows[i] * rows[h], with sign.
    fn rowsum_into(h: &mut Row, i: &Row, n: usize) {
        let mut e = 2 * h.r as i32 + 2 * i.r as i32;
        for q in 0..n {
            let (x1, z1) = i.get(q);
            if x1 | z1 {
                let (x2, z2) = h.get(q);
                e += g(x1, z1, x2, z2);
            }
        }
        h.r = e.rem_euclid(4) == 2;
        for w in 0..h.x.len() {
            h.x[w] ^= i.x[w];
            h.z[w] ^= i.z[w];
        }
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let src = self.rows[i].clone();
        Self::rowsum_into(&mut self.rows[h], &src, self.n);
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        let a = self.check(a)?;
        let b = match b {
            Some(b) => Some(self.check(b)?),
            None => None,
        };
        for row in &mut self.rows {
            let (xa, za) = row.get(a);
            match gate {
                Gate::H(_) => {
                    row.r ^= xa & za;
                    row.set(a, za, xa);
                }
                Gate::S(_) => {
                    row.r ^= xa & za;
                    row.set(a, xa, za ^ xa);
                }
                Gate::Sdg(_) => {
                    row.r ^= xa & !za;
                    row.set(a, xa, za ^ xa);
                }
                Gate::Cnot(..) => {
                    let b = b.unwrap();
                    let (xb, zb) = row.get(b);
                    row.r ^= xa & zb & !(xb ^ za);
                    row.set(b, xb ^ xa, zb);
                    row.set(a, xa, za ^ zb);
                }
                Gate::Cz(..) => {
                    let b = b.unwrap();
                    let (xb, zb) = row.get(b);
                    row.r ^= xa & xb & (za ^ zb);
                    row.set(a, xa, za ^ xb);
                    row.set(b, xb, zb ^ xa);
                }
                Gate::Swap(..) => {
                    let b = b.unwrap();
                    let (xb, zb) = row.get(b);
                    row.set(a, xb, zb);
                    row.set(b, xa, za);
                }
            }
        }
        Ok(())
    }

    pub fn apply_layer(&mut self, layer: &CliffordLayer) -> Result<()> {
        for g in layer.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli(p)?;
        for row in &mut self.rows {
            if row.anticommutes(p) {
                row.r ^= true;
            }
        }
        Ok(())
    }

    /// Outcome of measuring `p` if it is determined by the state.
    pub fn peek(&self, p: &PauliString) -> Result<Option<bool>> {
        self.check_pauli(p)?;
        let n = self.n;
        if (n..2 * n).any(|i| self.rows[i].anticommutes(p)) {
            return Ok(None);
        }
        let mut acc = Row::zero(self.words);
        for i in 0..n {
            if self.rows[i].anticommutes(p) {
                Self::rowsum_into(&mut acc, &self.rows[n + i], n);
            }
        }
        Ok(Some(acc.r))
    }

    /// Measures `p`; `forced` fixes a random outcome. Returns the outcome
    /// and whether it was random.
    fn measure_inner(
        &mut self,
        p: &PauliString,
        rng: &mut impl Rng,
        forced: Option<bool>,
    ) -> Result<(bool, bool)> {
        self.check_pauli(p)?;
        let n = self.n;
        let Some(pv) = (n..2 * n).find(|&i| self.rows[i].anticommutes(p)) else {
            return Ok((self.peek(p)?.unwrap(), false));
        };
        for i in 0..2 * n {
            if i != pv && self.rows[i].anticommutes(p) {
                self.rowsum(i, pv);
            }
        }
        self.rows[pv - n] = self.rows[pv].clone();
        let out = forced.unwrap_or_else(|| rng.gen());
        let mut row = Row::from_pauli(self.words, p);
        row.r = out;
        self.rows[pv] = row;
        Ok((out, true))
    }

    pub fn measure(&mut self, p: &PauliString, rng: &mut impl Rng) -> Result<bool> {
        Ok(self.measure_inner(p, rng, None)?.0)
    }

    pub fn postselect(&mut self, p: &PauliString, value: bool, rng: &mut impl Rng) -> Result<()> {
        let (out, _) = self.measure_inner(p, rng, Some(value))?;
        if out != value {
            return Err(Error::Program(format!(
                "cannot postselect {p} on a deterministic opposite outcome"
            )));
        }
        Ok(())
    }

    fn reset(&mut self, q: Qubit, basis: Pauli, rng: &mut impl Rng) -> Result<()> {
        let m = PauliString::single(q, basis);
        if self.measure(&m, rng)? {
            let flip = if basis == Pauli::Z {
                Pauli::X
            } else {
                Pauli::Z
            };
            self.apply_pauli(&PauliString::single(q, flip))?;
        }
        Ok(())
    }

    pub fn run_op(
        &mut self,
        op: &TableauOp,
        rng: &mut impl Rng,
        out: &mut Vec<bool>,
    ) -> Result<()> {
        match op {
            TableauOp::ResetZ(q) => self.reset(*q, Pauli::Z, rng)?,
            TableauOp::ResetX(q) => self.reset(*q, Pauli::X, rng)?,
            TableauOp::Layer(l) => self.apply_layer(l)?,
            TableauOp::MeasureZ(q) => {
                out.push(self.measure(&PauliString::single(*q, Pauli::Z), rng)?)
            }
            TableauOp::MeasureX(q) => {
                out.push(self.measure(&PauliString::single(*q, Pauli::X), rng)?)
            }
            TableauOp::MeasurePauli(p) => out.push(self.measure(p, rng)?),
            TableauOp::Postselect(p, v) => self.postselect(p, *v, rng)?,
            TableauOp::Apply(p) => self.apply_pauli(p)?,
        }
        Ok(())
    }
}

/// Runs `program` on |0…0⟩ and returns every recorded outcome in order.
pub fn tableau_run(n_qubits: usize, program: &[TableauOp], seed: u64) -> Result<Vec<bool>> {
    let mut t = Tableau::new(n_qubits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for op in program {
        t.run_op(op, &mut rng, &mut out)?;
    }
    Ok(out)
}
