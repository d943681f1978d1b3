#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "delaycert/certificates.hpp"
#include "delaycert/errors.hpp"

namespace delaycert {

std::vector<std::vector<std::size_t>> strong_components(const Matrix& m) {
    const std::size_t n = m.rows();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w = 0; w < n; ++w) {
            if (w == v || m(v, w) == 0.0) continue;
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comps;
}

bool is_irreducible(const Matrix& m) { return strong_components(m).size() == 1; }

PerronResult perron_iteration(const Matrix& a, double tol, std::size_t max_iter) {
    const std::size_t n = a.rows();
    PerronResult r;
    r.vector.assign(n, 1.0);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const Vector w = a * r.vector;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ratio = w[i] / r.vector[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const double top = max_entry(w);
        if (!(top > 0.0) || !std::isfinite(top)) throw NumericDomainError("power iteration lost positivity");
        for (std::size_t i = 0; i < n; ++i) r.vector[i] = w[i] / top;
        r.root = 0.5 * (lo + hi);
        r.iterations = it;
        // Collatz-Wielandt: lo <= rho <= hi for any positive vector
        if (hi - lo <= tol * std::max(1.0, hi)) return r;
    }
    throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

namespace {

Matrix principal_block(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix b(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = m(idx[i], idx[j]);
    return b;
}

double shift_for(const Matrix& m) {
    double c = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) c = std::max(c, std::abs(m(i, i)));
    return 1.0 + c;
}

}  // namespace

double spectral_bound(const Matrix& m) {
    if (!m.square() || m.rows() == 0) throw ContractError("spectral_bound needs a nonempty square matrix");
    if (!is_metzler(m)) throw ContractError("spectral_bound is only defined here for Metzler matrices");
    double best = -std::numeric_limits<double>::infinity();
    // block triangular form: the spectrum is the union of the diagonal blocks'
    for (const auto& comp : strong_components(m)) {
        if (comp.size() == 1) {
            best = std::max(best, m(comp[0], comp[0]));
            continue;
        }
        Matrix b = principal_block(m, comp);
        const double c = shift_for(b);
        for (std::size_t i = 0; i < b.rows(); ++i) b(i, i) += c;
        best = std::max(best, perron_iteration(b).root - c);
    }
    return best;
}

}  // namespace delaycert
