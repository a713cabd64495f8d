/**
 * Client-side PCA for embedding payloads flagged client_reduce_required.
 *
 * Fits on the received rows only (the server ships the light tier, never
 * its fitted reducer): center, build the covariance matrix, eigendecompose
 * it with a cyclic Jacobi sweep, keep the leading components. Component
 * signs follow the same convention as the server (largest-magnitude entry
 * positive) so the two reductions agree up to numerical error.
 */

export interface PcaModel {
  mean: number[];
  components: number[][]; // k x dim, rows orthonormal
  eigenvalues: number[];
}

function covarianceMatrix(rows: number[][], mean: number[]): number[][] {
  const n = rows.length;
  const dim = mean.length;
  const cov: number[][] = Array.from({ length: dim }, () => new Array(dim).fill(0));
  for (const row of rows) {
    for (let i = 0; i < dim; i++) {
      const di = row[i] - mean[i];
      for (let j = i; j < dim; j++) {
        cov[i][j] += di * (row[j] - mean[j]);
      }
    }
  }
  for (let i = 0; i < dim; i++) {
    for (let j = i; j < dim; j++) {
      cov[i][j] /= n - 1;
      cov[j][i] = cov[i][j];
    }
  }
  return cov;
}

/** Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations. */
function jacobiEigen(matrix: number[][]): { values: number[]; vectors: number[][] } {
  const dim = matrix.length;
  const a = matrix.map((row) => row.slice());
  // eigenvector columns, starts as identity
  const v: number[][] = Array.from({ length: dim }, (_, i) =>
    Array.from({ length: dim }, (_, j) => (i === j ? 1 : 0)),
  );

  const offDiagonal = () => {
    let sum = 0;
    for (let i = 0; i < dim; i++) {
      for (let j = i + 1; j < dim; j++) sum += a[i][j] * a[i][j];
    }
    return Math.sqrt(sum);
  };

  const scale = Math.max(1e-300, offDiagonal());
  for (let sweep = 0; sweep < 100 && offDiagonal() > 1e-14 * scale; sweep++) {
    for (let p = 0; p < dim - 1; p++) {
      for (let q = p + 1; q < dim; q++) {
        if (Math.abs(a[p][q]) < 1e-300) continue;
        const theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const t = Math.sign(theta || 1) / (Math.abs(theta) + Math.sqrt(theta * theta + 1));
        const c = 1 / Math.sqrt(t * t + 1);
        const s = t * c;
        for (let i = 0; i < dim; i++) {
          const aip = a[i][p];
          const aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (let i = 0; i < dim; i++) {
          const api = a[p][i];
          const aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
          const vip = v[i][p];
          const viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  return { values: a.map((row, i) => row[i]), vectors: v };
}

export function fitPca(rows: number[][], k: number): PcaModel {
  const n = rows.length;
  if (n < 2) throw new Error("need at least 2 vectors to reduce");
  const dim = rows[0].length;
  if (k > dim) throw new Error(`requested dimensionality ${k} exceeds received ${dim}`);
  if (k < 1 || k > n - 1) throw new Error(`dimensionality ${k} out of range [1, ${n - 1}]`);

  const mean = new Array(dim).fill(0);
  for (const row of rows) for (let i = 0; i < dim; i++) mean[i] += row[i];
  for (let i = 0; i < dim; i++) mean[i] /= n;

  const { values, vectors } = jacobiEigen(covarianceMatrix(rows, mean));
  const order = values
    .map((value, index) => ({ value, index }))
    .sort((x, y) => y.value - x.value)
    .slice(0, k);

  const components = order.map(({ index }) => {
    const comp = vectors.map((row) => row[index]);
    let argmax = 0;
    for (let i = 1; i < comp.length; i++) {
      if (Math.abs(comp[i]) > Math.abs(comp[argmax])) argmax = i;
    }
    return comp[argmax] < 0 ? comp.map((x) => -x) : comp;
  });

  return { mean, components, eigenvalues: order.map(({ value }) => value) };
}

export function transform(model: PcaModel, rows: number[][]): number[][] {
  return rows.map((row) =>
    model.components.map((comp) =>
      comp.reduce((acc, cj, j) => acc + cj * (row[j] - model.mean[j]), 0),
    ),
  );
}

/** Fit on the received rows and project them to k dimensions. */
export function clientPca(rows: number[][], k: number): number[][] {
  return transform(fitPca(rows, k), rows);
}
