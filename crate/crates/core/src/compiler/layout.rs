use super::{CompileError, DeviceSpec};

/// Paths up to this many qubits are scored exhaustively; longer ones are
/// grown greedily from every start qubit.
const EXHAUSTIVE_LIMIT: usize = 8;

/// Choose `k` physical qubits forming a connected path on the coupling graph.
///
/// A path scores the product of its qubit fidelities and the fidelities of
/// the edges joining consecutive qubits. The highest score wins; near-equal
/// scores fall back to the lexicographically smallest index sequence.
pub fn select_qubits(device: &DeviceSpec, k: usize) -> Result<Vec<usize>, CompileError> {
    if k > device.n_qubits() {
        return Err(CompileError::NotEnoughQubits {
            required: k,
            available: device.n_qubits(),
        });
    }
    if k == 0 {
        return Ok(vec![]);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut consider = |path: &[usize], score: f64| {
        let better = match &best {
            None => true,
            Some((s, p)) => {
                let tol = 1e-12 * s.abs().max(score.abs());
                score > s + tol || ((score - s).abs() <= tol && path < p.as_slice())
            }
        };
        if better {
            best = Some((score, path.to_vec()));
        }
    };
    if k <= EXHAUSTIVE_LIMIT {
        for start in 0..device.n_qubits() {
            let mut path = vec![start];
            let mut used = vec![false; device.n_qubits()];
            used[start] = true;
            extend(device, k, &mut path, &mut used, device.qubit_fidelity(start), &mut consider);
        }
    } else {
        for start in 0..device.n_qubits() {
            if let Some((path, score)) = greedy_path(device, start, k) {
                consider(&path, score);
            }
        }
    }
    best.map(|(_, p)| p).ok_or(CompileError::NoPath(k))
}

fn extend(
    device: &DeviceSpec,
    k: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    score: f64,
    consider: &mut impl FnMut(&[usize], f64),
) {
    if path.len() == k {
        consider(path, score);
        return;
    }
    let tail = *path.last().expect("non-empty path");
    for &next in device.neighbors(tail) {
        if used[next] {
            continue;
        }
        let edge = device.edge_fidelity(tail, next).expect("neighbor edge");
        used[next] = true;
        path.push(next);
        extend(device, k, path, used, score * edge * device.qubit_fidelity(next), consider);
        path.pop();
        used[next] = false;
    }
}

fn greedy_path(device: &DeviceSpec, start: usize, k: usize) -> Option<(Vec<usize>, f64)> {
    let mut path = vec![start];
    let mut used = vec![false; device.n_qubits()];
    used[start] = true;
    let mut score = device.qubit_fidelity(start);
    while path.len() < k {
        let tail = *path.last()?;
        let (next, gain) = device
            .neighbors(tail)
            .iter()
            .filter(|&&n| !used[n])
            .map(|&n| {
                let edge = device.edge_fidelity(tail, n).unwrap_or(0.0);
                (n, edge * device.qubit_fidelity(n))
            })
            .fold(None, |acc: Option<(usize, f64)>, (n, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((n, g)),
            })?;
        used[next] = true;
        path.push(next);
        score *= gain;
    }
    Some((path, score))
}

/// Order `path` so logical qubit `i` lands on `result[i]`, minimizing the
/// summed coupling distance over `pairs` (indices of interacting logical
/// qubits, one entry per two-qubit gate). Up to eight qubits every ordering
/// is tried; ties, and larger registers, keep the given order.
pub fn assign_to_path(device: &DeviceSpec, path: &[usize], pairs: &[(usize, usize)]) -> Vec<usize> {
    let k = path.len();
    if k > EXHAUSTIVE_LIMIT || pairs.is_empty() {
        return path.to_vec();
    }
    let dist: Vec<Vec<usize>> = path
        .iter()
        .map(|&p| {
            let row = device.distances_from(p);
            path.iter().map(|&q| row[q].unwrap_or(usize::MAX / 4)).collect()
        })
        .collect();
    let cost = |order: &[usize]| -> usize { pairs.iter().map(|&(a, b)| dist[order[a]][order[b]]).sum() };

    let mut order: Vec<usize> = (0..k).collect();
    let mut best = (cost(&order), order.clone());
    while next_permutation(&mut order) {
        let c = cost(&order);
        if c < best.0 {
            best = (c, order.clone());
        }
    }
    best.1.iter().map(|&i| path[i]).collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
