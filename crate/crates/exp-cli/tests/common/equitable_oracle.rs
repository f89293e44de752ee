//! Stand-alone average-age evaluator for the equitable-access device, used as
//! a brute-force reference. It shares no code with `shs-core`: the transition
//! table is transcribed separately and the two linear systems are solved with
//! plain Gaussian elimination on fixed-size arrays.

const STATES: usize = 8;
const SLOTS: usize = 4;
const DIM: usize = STATES * SLOTS;

#[derive(Clone, Copy)]
enum Rate {
    Local,
    Offload,
    Exo,
    Tx,
    Lp,
    Es,
}

// (from, rate, to, reset) with -1 meaning "reset to zero". States are 0-based.
#[rustfmt::skip]
const TABLE: [(usize, Rate, usize, [i8; 4]); 45] = {
    use Rate::*;
    [
        (0, Local, 2, [0, 1, -1, 3]), (0, Offload, 0, [0, -1, 2, 3]), (0, Exo, 6, [0, 1, 2, 0]),
        (0, Tx, 4, [0, -1, 2, 1]), (0, Lp, 0, [2, 1, 2, 2]), (0, Es, 0, [3, 1, 2, 3]),
        (1, Local, 2, [0, 1, -1, 3]), (1, Offload, 1, [0, -1, 2, 3]), (1, Exo, 6, [0, 1, 2, 0]),
        (1, Tx, 4, [0, -1, 2, 1]), (1, Lp, 1, [2, 1, 2, 3]), (1, Es, 1, [3, 1, 3, 3]),
        (2, Local, 2, [0, 1, -1, 3]), (2, Offload, 0, [0, -1, 2, 3]), (2, Exo, 7, [0, 1, 2, 0]),
        (2, Tx, 3, [0, -1, 2, 1]), (2, Lp, 2, [2, 2, 2, 2]), (2, Es, 2, [3, 1, 2, 3]),
        (3, Local, 3, [0, -1, -1, 3]), (3, Offload, 0, [0, -1, 2, 3]), (3, Exo, 5, [0, -1, 2, 0]),
        (3, Lp, 3, [2, -1, 2, 2]), (3, Es, 3, [3, -1, 2, 3]),
        (4, Local, 3, [0, -1, -1, 3]), (4, Offload, 1, [0, -1, 2, 3]), (4, Exo, 5, [0, -1, 2, 0]),
        (4, Lp, 4, [2, -1, 2, 3]), (4, Es, 4, [3, -1, 3, 3]),
        (5, Local, 5, [0, -1, -1, 3]), (5, Offload, 6, [0, -1, 2, 3]), (5, Exo, 5, [0, -1, 2, 0]),
        (5, Lp, 5, [2, -1, 2, 2]), (5, Es, 5, [3, -1, 2, 3]),
        (6, Local, 7, [0, 1, -1, 3]), (6, Offload, 6, [0, -1, 2, 3]), (6, Exo, 6, [0, 1, 2, 0]),
        (6, Tx, 4, [0, -1, 2, 1]), (6, Lp, 6, [2, 1, 2, 2]), (6, Es, 6, [3, 1, 2, 3]),
        (7, Local, 7, [0, 1, -1, 3]), (7, Offload, 6, [0, -1, 2, 3]), (7, Exo, 7, [0, 1, 2, 0]),
        (7, Tx, 3, [0, -1, 2, 1]), (7, Lp, 7, [2, 2, 2, 2]), (7, Es, 7, [3, 1, 2, 3]),
    ]
};

const T_IDLE: [bool; STATES] = [false, false, false, true, true, true, false, false];

/// Average monitor age, or `None` when a rate is not strictly positive where
/// it must be or elimination meets a zero pivot.
pub fn average_age(
    lambda: f64,
    p: f64,
    mu1: f64,
    mu2: f64,
    mu3: f64,
    lambda_e: f64,
) -> Option<f64> {
    if !(lambda > 0.0
        && mu1 > 0.0
        && mu2 > 0.0
        && mu3 > 0.0
        && lambda_e >= 0.0
        && (0.0..=1.0).contains(&p))
    {
        return None;
    }
    let rate = |r: Rate| match r {
        Rate::Local => lambda * p,
        Rate::Offload => lambda * (1.0 - p),
        Rate::Exo => lambda_e,
        Rate::Tx => mu1,
        Rate::Lp => mu2,
        Rate::Es => mu3,
    };

    let mut live = [false; STATES];
    live[0] = true;
    loop {
        let mut grew = false;
        for &(from, r, to, _) in &TABLE {
            if live[from] && !live[to] && rate(r) > 0.0 {
                live[to] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let mut index = [usize::MAX; STATES];
    let mut n = 0;
    for s in 0..STATES {
        if live[s] {
            index[s] = n;
            n += 1;
        }
    }

    // Balance equations, last one replaced by normalization.
    let mut a = [[0.0; STATES + 1]; STATES];
    for &(from, r, to, _) in &TABLE {
        let q = rate(r);
        if q == 0.0 || from == to || !live[from] {
            continue;
        }
        let (i, j) = (index[from], index[to]);
        a[i][i] -= q;
        a[j][i] += q;
    }
    for col in a[n - 1].iter_mut().take(n) {
        *col = 1.0;
    }
    a[n - 1][STATES] = 1.0;
    let mut rows: Vec<&mut [f64]> = a.iter_mut().take(n).map(|r| &mut r[..]).collect();
    let pi_live = eliminate(&mut rows, n, STATES)?;
    let mut pi = [0.0; STATES];
    for s in 0..STATES {
        if live[s] {
            pi[s] = pi_live[index[s]];
        }
    }

    // v_s * out_s - sum_{l into s} q_l (v_src A_l) = u_s pi_s
    let m = n * SLOTS;
    let mut c = [[0.0; DIM + 1]; DIM];
    let mut out = [0.0; STATES];
    for &(from, r, _, _) in &TABLE {
        out[from] += rate(r);
    }
    for s in 0..STATES {
        if !live[s] {
            continue;
        }
        for k in 0..SLOTS {
            let row = index[s] * SLOTS + k;
            c[row][row] += out[s];
            let grows = !(k == 1 && T_IDLE[s]);
            c[row][DIM] = if grows { pi[s] } else { 0.0 };
        }
    }
    for &(from, r, to, reset) in &TABLE {
        let q = rate(r);
        if q == 0.0 || !live[from] {
            continue;
        }
        for (k, &src) in reset.iter().enumerate() {
            if src >= 0 {
                c[index[to] * SLOTS + k][index[from] * SLOTS + src as usize] -= q;
            }
        }
    }
    let mut rows: Vec<&mut [f64]> = c.iter_mut().take(m).map(|r| &mut r[..]).collect();
    let v = eliminate(&mut rows, m, DIM)?;
    let delta: f64 = (0..n).map(|i| v[i * SLOTS]).sum();
    (delta.is_finite() && delta > 0.0).then_some(delta)
}

/// Gaussian elimination with partial pivoting on the leading `n x n` block;
/// the right-hand side sits in column `rhs`.
fn eliminate(rows: &mut [&mut [f64]], n: usize, rhs: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let piv = (k..n).max_by(|&x, &y| rows[x][k].abs().total_cmp(&rows[y][k].abs()))?;
        if rows[piv][k] == 0.0 {
            return None;
        }
        rows.swap(k, piv);
        let (top, rest) = rows.split_at_mut(k + 1);
        let prow = &top[k];
        for row in rest.iter_mut() {
            let f = row[k] / prow[k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                row[j] -= f * prow[j];
            }
            row[rhs] -= f * prow[rhs];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| rows[k][j] * x[j]).sum();
        x[k] = (rows[k][rhs] - s) / rows[k][k];
    }
    Some(x)
}
