#include "ghostproj/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ghostproj {

WeightProblem build_design(const RandomBasis& basis, const Image& image)
{
    const auto& spec = basis.spec();
    if (spec.rows != image.rows() || spec.cols != image.cols())
        throw std::invalid_argument("build_design: basis/image dimensions disagree");
    if (!basis.fits_in_memory())
        throw std::runtime_error(
            "build_design: basis exceeds the memory cap; numeric optimization "
            "requires a materializable design matrix");

    const long nm = spec.pixels();
    const auto n = static_cast<Eigen::Index>(spec.count);

    WeightProblem p;
    p.rows = spec.rows;
    p.cols = spec.cols;
    p.design.resize(nm, n);
    p.column_mean.resize(n);
    std::vector<double> mask(static_cast<std::size_t>(nm));
    for (Eigen::Index k = 0; k < n; ++k) {
        basis.fill_mask(static_cast<std::uint64_t>(k), mask);
        double mean = 0.0;
        for (long q = 0; q < nm; ++q)
            mean += mask[q];
        mean /= static_cast<double>(nm);
        p.column_mean[k] = mean;
        for (long q = 0; q < nm; ++q)
            p.design(q, k) = mask[q] - mean;
    }

    const double img_mean = image.mean();
    p.target.resize(nm);
    for (long q = 0; q < nm; ++q)
        p.target[q] = image.values()[static_cast<std::size_t>(q)] - img_mean;
    return p;
}

namespace {

/// Upper-triangular Cholesky factor of the Gram matrix of the passive
/// columns, maintained incrementally (append) and via Givens rotations
/// (erase).
class PassiveChol {
public:
    explicit PassiveChol(const Eigen::MatrixXd& a)
        : a_(a), cap_(std::min(a.rows(), a.cols())), r_(cap_, cap_), p_(0)
    {
    }

    Eigen::Index size() const { return p_; }

    bool push(const std::vector<int>& passive, int j)
    {
        const double diag = a_.col(j).squaredNorm();
        Eigen::VectorXd g(p_);
        for (Eigen::Index i = 0; i < p_; ++i)
            g[i] = a_.col(passive[static_cast<std::size_t>(i)]).dot(a_.col(j));
        Eigen::VectorXd v =
            r_.topLeftCorner(p_, p_).triangularView<Eigen::Upper>().transpose().solve(g);
        const double d = diag - v.squaredNorm();
        if (!(d > 1e-12 * (diag > 0.0 ? diag : 1.0)))
            return false; // numerically dependent column
        r_.col(p_).head(p_) = v;
        r_(p_, p_) = std::sqrt(d);
        ++p_;
        return true;
    }

    void erase(Eigen::Index q)
    {
        for (Eigen::Index c = q; c + 1 < p_; ++c)
            r_.col(c).head(c + 2) = r_.col(c + 1).head(c + 2);
        // Rows q..p_-1 now carry one subdiagonal entry each; rotate them out.
        for (Eigen::Index c = q; c + 1 < p_; ++c) {
            const double x = r_(c, c), y = r_(c + 1, c);
            const double h = std::hypot(x, y);
            if (h == 0.0)
                continue;
            const double cs = x / h, sn = y / h;
            for (Eigen::Index cc = c; cc + 1 < p_; ++cc) {
                const double u = r_(c, cc), w = r_(c + 1, cc);
                r_(c, cc) = cs * u + sn * w;
                r_(c + 1, cc) = -sn * u + cs * w;
            }
        }
        --p_;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const
    {
        Eigen::VectorXd y =
            r_.topLeftCorner(p_, p_).triangularView<Eigen::Upper>().transpose().solve(rhs);
        return r_.topLeftCorner(p_, p_).triangularView<Eigen::Upper>().solve(y);
    }

private:
    const Eigen::MatrixXd& a_;
    Eigen::Index cap_;
    Eigen::MatrixXd r_;
    Eigen::Index p_;
};

} // namespace

Eigen::VectorXd nnls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           double tol_scale, int max_iter)
{
    const Eigen::Index n = a.cols();
    if (max_iter < 0)
        max_iter = static_cast<int>(10 * n);

    const Eigen::VectorXd atb = a.transpose() * b;
    double tol = tol_scale * atb.lpNorm<Eigen::Infinity>();
    if (tol == 0.0)
        tol = tol_scale;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd resid = b;
    std::vector<int> passive;
    std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    PassiveChol chol(a);

    for (int iter = 0; iter < max_iter; ++iter) {
        // Most-violating KKT candidate among the zero-weight columns.
        const Eigen::VectorXd grad = a.transpose() * resid;
        int j = -1;
        double best = tol;
        for (Eigen::Index k = 0; k < n; ++k)
            if (!in_passive[static_cast<std::size_t>(k)] &&
                !blocked[static_cast<std::size_t>(k)] && grad[k] > best) {
                best = grad[k];
                j = static_cast<int>(k);
            }
        if (j < 0)
            return w; // KKT satisfied

        if (!chol.push(passive, j)) {
            blocked[static_cast<std::size_t>(j)] = 1;
            continue;
        }
        passive.push_back(j);
        in_passive[static_cast<std::size_t>(j)] = 1;
        std::fill(blocked.begin(), blocked.end(), 0);

        // Inner loop: unconstrained solve on the passive set, walking back
        // along the segment whenever components go non-positive.
        for (;;) {
            const auto p = static_cast<Eigen::Index>(passive.size());
            Eigen::VectorXd rhs(p);
            for (Eigen::Index i = 0; i < p; ++i)
                rhs[i] = atb[passive[static_cast<std::size_t>(i)]];
            const Eigen::VectorXd z = chol.solve(rhs);

            bool all_positive = true;
            double alpha = 1.0;
            for (Eigen::Index i = 0; i < p; ++i)
                if (z[i] <= 0.0) {
                    all_positive = false;
                    const double wi = w[passive[static_cast<std::size_t>(i)]];
                    alpha = std::min(alpha, wi / (wi - z[i]));
                }

            if (all_positive) {
                for (Eigen::Index i = 0; i < p; ++i)
                    w[passive[static_cast<std::size_t>(i)]] = z[i];
                break;
            }

            for (Eigen::Index i = 0; i < p; ++i) {
                const int k = passive[static_cast<std::size_t>(i)];
                w[k] += alpha * (z[i] - w[k]);
            }
            // Drop every passive member pinned at (or pushed through) zero.
            for (Eigen::Index i = p - 1; i >= 0; --i) {
                const int k = passive[static_cast<std::size_t>(i)];
                if (z[i] <= 0.0 && w[k] <= alpha * 1e-12 + 1e-300) {
                    w[k] = 0.0;
                    chol.erase(i);
                    in_passive[static_cast<std::size_t>(k)] = 0;
                    passive.erase(passive.begin() + i);
                }
            }
            if (passive.empty())
                break;
        }

        resid = b;
        for (int k : passive)
            resid -= w[k] * a.col(k);
    }
    throw std::runtime_error("nnls_solve: iteration cap exceeded");
}

NnlsResult nnls(const WeightProblem& problem)
{
    NnlsResult res;
    res.kkt_tolerance = 1e-10 * (problem.design.transpose() * problem.target)
                                    .lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd w = nnls_solve(problem.design, problem.target);
    const Eigen::VectorXd resid = problem.design * w - problem.target;
    res.residual_norm = resid.norm();

    const double nm = static_cast<double>(problem.nm());
    const double var = resid.squaredNorm() / nm;
    const double e2 = problem.target.squaredNorm() / nm;
    res.snr = var > 0.0 ? std::sqrt(e2 / var) : std::numeric_limits<double>::infinity();

    res.plan.weights.assign(w.data(), w.data() + w.size());
    res.plan.scheme = SchemeTag::nnls;
    res.plan.pedestal_predicted = problem.column_mean.dot(w);
    for (double x : res.plan.weights)
        if (x > 0.0)
            ++res.active_count;
    return res;
}

namespace {

struct GaObjective {
    // F(w) = lambda^2 mean(r^2) + lambda c.w  with r = Mw - I; the spatial
    // average of the Poisson variance map.
    const WeightProblem& p;
    double lambda;
    double nm;

    double value(const Eigen::VectorXd& resid, const Eigen::VectorXd& w) const
    {
        return lambda * lambda * resid.squaredNorm() / nm +
               lambda * p.column_mean.dot(w);
    }
    Eigen::VectorXd gradient(const Eigen::VectorXd& resid) const
    {
        return (2.0 * lambda * lambda / nm) * (p.design.transpose() * resid) +
               lambda * p.column_mean;
    }
};

} // namespace

GaResult gradient_ascent_poisson(const WeightProblem& problem, double lambda,
                                 const ExposurePlan& w0, int max_iter)
{
    if (lambda <= 0.0)
        throw std::invalid_argument("gradient_ascent_poisson: lambda must be > 0");
    if (!w0.indices.empty() ||
        w0.weights.size() != static_cast<std::size_t>(problem.design.cols()))
        throw std::invalid_argument(
            "gradient_ascent_poisson: w0 must be a dense plan over all masks");

    const double nm = static_cast<double>(problem.nm());
    const double e2 = problem.target.squaredNorm() / nm;
    GaObjective obj{problem, lambda, nm};

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
        w0.weights.data(), static_cast<Eigen::Index>(w0.weights.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] < 0.0)
            throw std::invalid_argument("gradient_ascent_poisson: w0 must be non-negative");

    Eigen::VectorXd resid = problem.design * w - problem.target;
    double f = obj.value(resid, w);
    if (!std::isfinite(f))
        throw std::runtime_error("gradient_ascent_poisson: non-finite objective");

    double step = 1.0 / problem.design.squaredNorm();
    std::vector<double> snr_history;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const Eigen::VectorXd grad = obj.gradient(resid);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd w_new = (w - step * grad).cwiseMax(0.0);
            const Eigen::VectorXd delta = w_new - w;
            const double decrease = -grad.dot(delta);
            if (delta.isZero(0.0))
                break;
            const Eigen::VectorXd resid_new = resid + problem.design * delta;
            const double f_new = obj.value(resid_new, w_new);
            if (f_new <= f - 1e-4 * decrease) {
                w = std::move(w_new);
                resid = resid_new;
                f = f_new;
                accepted = true;
                step *= 2.0; // gentle re-expansion after success
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            break;

        const double snr = std::sqrt(lambda * lambda * e2 / f);
        snr_history.push_back(snr);
        if (snr_history.size() > 50) {
            const double old = snr_history[snr_history.size() - 51];
            if (snr - old < 1e-6 * old)
                break;
        }
    }

    GaResult res;
    res.plan.weights.assign(w.data(), w.data() + w.size());
    res.plan.scheme = SchemeTag::gradient_ascent;
    res.objective = f;
    res.pedestal = problem.column_mean.dot(w);
    res.plan.pedestal_predicted = res.pedestal;
    res.snr = std::sqrt(lambda * lambda * e2 / f);
    res.iterations = iter;
    return res;
}

double ga_gradient_max_rel_error(const WeightProblem& problem, double lambda,
                                 const ExposurePlan& w, double step)
{
    const double nm = static_cast<double>(problem.nm());
    GaObjective obj{problem, lambda, nm};
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(
        w.weights.data(), static_cast<Eigen::Index>(w.weights.size()));
    const Eigen::VectorXd resid = problem.design * wv - problem.target;
    const Eigen::VectorXd grad = obj.gradient(resid);

    const double scale = grad.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < wv.size(); ++k) {
        // Perturbing w_k only shifts the residual along column k.
        const Eigen::VectorXd r_plus = resid + step * problem.design.col(k);
        const Eigen::VectorXd r_minus = resid - step * problem.design.col(k);
        const double f_plus = obj.value(r_plus, wv) + lambda * problem.column_mean[k] * step;
        const double f_minus = obj.value(r_minus, wv) - lambda * problem.column_mean[k] * step;
        const double fd = (f_plus - f_minus) / (2.0 * step);
        const double denom = std::max(std::abs(grad[k]), 1e-3 * scale);
        worst = std::max(worst, std::abs(fd - grad[k]) / denom);
    }
    return worst;
}

} // namespace ghostproj
