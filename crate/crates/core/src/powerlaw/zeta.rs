// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Hurwitz zeta function for real `s > 1`, `q > 0`.

// B_2, B_4, ..., B_16
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ζ(s, q) = Σ_{k≥0} (q + k)^(-s)` by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta needs s > 1, got {s}");
    assert!(q > 0.0, "hurwitz_zeta needs q > 0, got {q}");
    // push the expansion point far enough out that the remainder is tiny
    let shift = (10.0f64).max(s + 10.0);
    let n_direct = if q >= shift { 0 } else { (shift - q).ceil() as usize };
    let mut head = 0.0;
    for k in 0..n_direct {
        head += (q + k as f64).powf(-s);
    }
    let a = q + n_direct as f64;
    let a_pow = a.powf(-s);
    let mut tail = a * a_pow / (s - 1.0) + 0.5 * a_pow;
    // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^(-s-2j+1)
    let mut poch = s;
    let mut fact = 2.0;
    let mut power = a_pow / a;
    let inv_a2 = 1.0 / (a * a);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * poch * power;
        tail += term;
        if term.abs() < 1e-17 * tail.abs() {
            break;
        }
        let m = 2.0 * (j + 1) as f64;
        poch *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        power *= inv_a2;
    }
    head + tail
}
