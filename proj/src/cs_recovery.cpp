// SPDX-License-Identifier: Apache-2.0

#include "sacr/cs_recovery.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sacr
{
    namespace
    {
        struct Setup
        {
            Eigen::VectorXd inv_norms;
            int cap = 0;
            int max_iter = 0;
        };

        Setup prepare(const CVector &y, const CMatrix &dict, const RecoveryParams &params)
        {
            params.validate();
            if (dict.rows() != y.size())
                throw DimensionError("sparse solver: dictionary has " + std::to_string(dict.rows()) + " rows but y has " +
                                     std::to_string(y.size()) + " entries");
            if (dict.cols() < 1)
                throw DimensionError("sparse solver: empty dictionary");

            Setup s;
            const Eigen::VectorXd norms = dict.colwise().norm().transpose();
            if ((norms.array() <= 0.0).any())
                throw std::invalid_argument("sparse solver: dictionary has a zero column");
            s.inv_norms = norms.cwiseInverse();

            const auto k = static_cast<int>(y.size());
            const auto d = static_cast<int>(dict.cols());
            s.cap = std::min({params.max_sparsity.value_or(k), k, d});
            s.max_iter = params.max_iter > 0 ? params.max_iter : 10 * k;
            return s;
        }

        // Indices of the `count` largest scores; lower index wins ties
        std::vector<int> top_indices(const Eigen::VectorXd &score, int count)
        {
            std::vector<int> idx(static_cast<std::size_t>(score.size()));
            std::iota(idx.begin(), idx.end(), 0);
            count = std::min<int>(count, static_cast<int>(idx.size()));
            std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), [&](int a, int b)
                              {
                                  if (score(a) != score(b))
                                      return score(a) > score(b);
                                  return a < b; });
            idx.resize(static_cast<std::size_t>(count));
            return idx;
        }

        SparseSolution zero_solution(const CVector &y, const CMatrix &dict)
        {
            SparseSolution s;
            s.coefficients = CVector::Zero(dict.cols());
            s.residual_norm = y.norm();
            s.relative_residual = y.norm() > 0.0 ? 1.0 : 0.0;
            s.converged = y.norm() == 0.0;
            return s;
        }

        void scatter(SparseSolution &s, const std::vector<int> &support, const CVector &x, Eigen::Index dim)
        {
            s.coefficients = CVector::Zero(dim);
            for (std::size_t i = 0; i < support.size(); ++i)
                s.coefficients(support[i]) = x(static_cast<Eigen::Index>(i));
            s.support = support;
            std::sort(s.support.begin(), s.support.end());
        }
    }

    void RecoveryParams::validate() const
    {
        if (!(epsilon >= 0.0))
            throw ConfigError("recovery.epsilon must be >= 0");
        if (step_size < 1)
            throw ConfigError("recovery.step_size must be >= 1");
        if (max_sparsity && *max_sparsity < 1)
            throw ConfigError("recovery.max_sparsity must be >= 1");
        if (max_iter < 0)
            throw ConfigError("recovery.max_iter must be >= 0");
    }

    SupportFit fit_support(const CVector &y, const CMatrix &dict, const std::vector<int> &support)
    {
        SupportFit fit;
        if (support.empty())
        {
            fit.x = CVector(0);
            fit.residual = y;
            return fit;
        }
        CMatrix sub(dict.rows(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t i = 0; i < support.size(); ++i)
            sub.col(static_cast<Eigen::Index>(i)) = dict.col(support[i]);

        Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
        if (qr.rank() == sub.cols())
            fit.x = qr.solve(y);
        else
        {
            // minimum-norm solution on a rank-deficient support
            fit.rank_deficient = true;
            fit.x = Eigen::CompleteOrthogonalDecomposition<CMatrix>(sub).solve(y);
        }
        fit.residual = y - sub * fit.x;
        return fit;
    }

    namespace
    {
        // Support least squares through the cached Gram matrix; pivoted QR when the
        // restricted Gram block is ill-conditioned.
        class SupportSolver
        {
        public:
            SupportSolver(const CVector &y, const CMatrix &dict)
                : y_(y), dict_(dict), gram_(dict.adjoint() * dict), rhs_(dict.adjoint() * y) {}

            SupportFit fit(const std::vector<int> &support) const
            {
                const auto s = static_cast<Eigen::Index>(support.size());
                if (s == 0 || s > dict_.rows())
                    return fit_support(y_, dict_, support);

                CMatrix g(s, s);
                CVector b(s);
                for (Eigen::Index i = 0; i < s; ++i)
                {
                    b(i) = rhs_(support[static_cast<std::size_t>(i)]);
                    for (Eigen::Index j = 0; j < s; ++j)
                        g(i, j) = gram_(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
                }
                Eigen::LLT<CMatrix> llt(g);
                if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-10))
                    return fit_support(y_, dict_, support);

                SupportFit fit;
                fit.x = llt.solve(b);
                fit.residual = y_;
                for (Eigen::Index i = 0; i < s; ++i)
                    fit.residual.noalias() -= fit.x(i) * dict_.col(support[static_cast<std::size_t>(i)]);
                return fit;
            }

        private:
            const CVector &y_;
            const CMatrix &dict_;
            CMatrix gram_;
            CVector rhs_;
        };
    }

    SparseSolution omp(const CVector &y, const CMatrix &dict, const RecoveryParams &params)
    {
        const Setup setup = prepare(y, dict, params);
        const double y_norm = y.norm();
        SparseSolution sol = zero_solution(y, dict);
        if (y_norm == 0.0 || sol.relative_residual <= params.epsilon)
        {
            sol.converged = true;
            return sol;
        }

        const SupportSolver solver(y, dict);
        std::vector<int> support;
        std::vector<char> used(static_cast<std::size_t>(dict.cols()), 0);
        CVector residual = y;
        CVector x;
        while (static_cast<int>(support.size()) < setup.cap && sol.iterations < setup.max_iter)
        {
            const Eigen::VectorXd corr = (dict.adjoint() * residual).cwiseAbs().cwiseProduct(setup.inv_norms);
            int best = -1;
            for (Eigen::Index j = 0; j < corr.size(); ++j)
                if (!used[static_cast<std::size_t>(j)] && (best < 0 || corr(j) > corr(best)))
                    best = static_cast<int>(j);
            if (best < 0)
                break;

            used[static_cast<std::size_t>(best)] = 1;
            support.push_back(best);
            SupportFit fit = solver.fit(support);
            sol.rank_deficient = sol.rank_deficient || fit.rank_deficient;
            residual = std::move(fit.residual);
            x = std::move(fit.x);
            ++sol.iterations;

            const double rel = residual.norm() / y_norm;
            sol.residual_history.push_back(rel);
            if (rel <= params.epsilon)
            {
                sol.converged = true;
                break;
            }
        }

        scatter(sol, support, x, dict.cols());
        sol.residual_norm = residual.norm();
        sol.relative_residual = sol.residual_norm / y_norm;
        sol.stages_used = static_cast<int>(support.size());
        return sol;
    }

    SparseSolution samp(const CVector &y, const CMatrix &dict, const RecoveryParams &params)
    {
        const Setup setup = prepare(y, dict, params);
        const double y_norm = y.norm();
        SparseSolution sol = zero_solution(y, dict);
        if (y_norm == 0.0 || sol.relative_residual <= params.epsilon)
        {
            sol.converged = true;
            return sol;
        }

        const Eigen::VectorXd col_norms = setup.inv_norms.cwiseInverse();
        const SupportSolver solver(y, dict);
        std::vector<int> support; // F
        CVector x;
        CVector residual = y;
        double residual_norm = y_norm;
        int stage = 1;
        int size = params.step_size; // L

        while (sol.iterations < setup.max_iter && size <= setup.cap)
        {
            ++sol.iterations;

            // preliminary test: L atoms best correlated with the residual
            const Eigen::VectorXd corr = (dict.adjoint() * residual).cwiseAbs().cwiseProduct(setup.inv_norms);
            std::vector<int> candidates = top_indices(corr, size);
            for (int j : support)
                if (std::find(candidates.begin(), candidates.end(), j) == candidates.end())
                    candidates.push_back(j);
            std::sort(candidates.begin(), candidates.end());

            // final test: keep the L largest (column-norm weighted) coefficients
            const SupportFit wide = solver.fit(candidates);
            Eigen::VectorXd weight(static_cast<Eigen::Index>(candidates.size()));
            for (std::size_t i = 0; i < candidates.size(); ++i)
                weight(static_cast<Eigen::Index>(i)) = std::abs(wide.x(static_cast<Eigen::Index>(i))) * col_norms(candidates[i]);
            std::vector<int> trial;
            for (int i : top_indices(weight, size))
                trial.push_back(candidates[static_cast<std::size_t>(i)]);
            std::sort(trial.begin(), trial.end());

            SupportFit fit = solver.fit(trial);
            sol.rank_deficient = sol.rank_deficient || wide.rank_deficient || fit.rank_deficient;
            const double trial_norm = fit.residual.norm();

            if (trial_norm <= params.epsilon * y_norm)
            {
                support = std::move(trial);
                x = std::move(fit.x);
                residual = std::move(fit.residual);
                residual_norm = trial_norm;
                sol.residual_history.push_back(residual_norm / y_norm);
                sol.converged = true;
                break;
            }
            if (trial_norm >= residual_norm)
            {
                // stalled: next stage with a larger support size
                ++stage;
                size = stage * params.step_size;
                continue;
            }
            support = std::move(trial);
            x = std::move(fit.x);
            residual = std::move(fit.residual);
            residual_norm = trial_norm;
            sol.residual_history.push_back(residual_norm / y_norm);
        }

        scatter(sol, support, x, dict.cols());
        sol.residual_norm = residual_norm;
        sol.relative_residual = residual_norm / y_norm;
        sol.stages_used = stage;
        return sol;
    }

    namespace
    {
        void check_feedback(const CVector &y_fb, const PilotMatrix &pilots, Eigen::Index n)
        {
            if (y_fb.size() != pilots.length())
                throw DimensionError("channel recovery: feedback length " + std::to_string(y_fb.size()) +
                                     " does not match pilot length " + std::to_string(pilots.length()));
            if (pilots.antennas() != n)
                throw DimensionError("channel recovery: pilot width " + std::to_string(pilots.antennas()) +
                                     " does not match basis size " + std::to_string(n));
        }

        ChannelEstimate degenerate_estimate(Eigen::Index n, Eigen::Index dict_cols, const CVector &y)
        {
            ChannelEstimate est;
            est.h = CVector::Zero(n);
            est.solution = SparseSolution{};
            est.solution.coefficients = CVector::Zero(dict_cols);
            est.solution.residual_norm = y.norm();
            est.degenerate = true;
            return est;
        }
    }

    ChannelEstimate recover_channel_sensed(const CVector &y_fb, const PilotMatrix &pilots, const SensedBasis &basis,
                                           const RecoveryParams &params, DictionaryMode mode)
    {
        const Eigen::Index n = basis.u.rows();
        check_feedback(y_fb, pilots, n);
        if (basis.rank < 1)
            throw std::invalid_argument("recover_channel_sensed: basis has rank zero");

        const CMatrix atoms = mode == DictionaryMode::restricted ? CMatrix(basis.leading()) : basis.u;
        if (y_fb.norm() == 0.0)
            return degenerate_estimate(n, atoms.cols(), y_fb);

        RecoveryParams capped = params;
        capped.max_sparsity = std::min(params.max_sparsity.value_or(basis.rank), basis.rank);

        ChannelEstimate est;
        est.solution = samp(y_fb, pilots.entries * atoms, capped);
        est.h = atoms * est.solution.coefficients;
        est.degenerate = est.h.norm() == 0.0;
        return est;
    }

    ChannelEstimate recover_channel_dft(const CVector &y_fb, const PilotMatrix &pilots, const CMatrix &dft,
                                        const RecoveryParams &params)
    {
        const Eigen::Index n = dft.rows();
        check_feedback(y_fb, pilots, n);
        if (y_fb.norm() == 0.0)
            return degenerate_estimate(n, dft.cols(), y_fb);

        ChannelEstimate est;
        est.solution = samp(y_fb, pilots.entries * dft, params);
        est.h = dft * est.solution.coefficients;
        est.degenerate = est.h.norm() == 0.0;
        return est;
    }
}
