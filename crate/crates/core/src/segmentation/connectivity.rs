use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// 4-connected components of equal-label regions.
///
/// Component ids are assigned in row-major order of each component's first
/// pixel. Returns `(component id per pixel, component sizes)`.
pub fn connected_components(width: usize, height: usize, labels: &[u32]) -> (Vec<u32>, Vec<usize>) {
    const UNSET: u32 = u32::MAX;
    let mut comp = vec![UNSET; width * height];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..width * height {
        if comp[start] != UNSET {
            continue;
        }
        let id = sizes.len() as u32;
        let label = labels[start];
        comp[start] = id;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % width, i / width);
            let mut visit = |j: usize| {
                if comp[j] == UNSET && labels[j] == label {
                    comp[j] = id;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < width {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - width);
            }
            if y + 1 < height {
                visit(i + width);
            }
        }
        sizes.push(size);
    }
    (comp, sizes)
}

/// Splits every label into its 4-connected pieces, then merges pieces
/// smaller than `min_size` into the neighboring group they share the most
/// boundary with (ties to the lower group id). Every output region is
/// 4-connected. Returns raw (not yet densified) group ids per pixel.
pub fn absorb_small_components(width: usize, height: usize, labels: &[u32], min_size: usize) -> Vec<u32> {
    let (comp, sizes) = connected_components(width, height, labels);
    let n = sizes.len();
    let mut contacts: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); n];
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let mut touch = |j: usize| {
                let (a, b) = (comp[i], comp[j]);
                if a != b {
                    *contacts[a as usize].entry(b).or_insert(0) += 1;
                    *contacts[b as usize].entry(a).or_insert(0) += 1;
                }
            };
            if x + 1 < width {
                touch(i + 1);
            }
            if y + 1 < height {
                touch(i + width);
            }
        }
    }

    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut group_size = sizes;
    fn find(parent: &mut [u32], mut c: u32) -> u32 {
        while parent[c as usize] != c {
            let next = parent[c as usize];
            parent[c as usize] = parent[next as usize];
            c = next;
        }
        c
    }

    for c in 0..n as u32 {
        loop {
            let g = find(&mut parent, c);
            if group_size[g as usize] >= min_size {
                break;
            }
            // Contacts are keyed by group roots, so the best entry is the target.
            let Some((&target, _)) = contacts[g as usize]
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            else {
                break;
            };
            let (root, other) = if g < target { (g, target) } else { (target, g) };
            parent[other as usize] = root;
            group_size[root as usize] += group_size[other as usize];
            let moved = core::mem::take(&mut contacts[other as usize]);
            contacts[root as usize].remove(&other);
            for (k, cnt) in moved {
                if k == root {
                    continue;
                }
                *contacts[root as usize].entry(k).or_insert(0) += cnt;
                let back = &mut contacts[k as usize];
                let old = back.remove(&other).unwrap_or(0);
                *back.entry(root).or_insert(0) += old;
            }
        }
    }
    comp.iter().map(|&c| find(&mut parent, c)).collect()
}
