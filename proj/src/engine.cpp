#include "gofperm/engine.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <optional>

#include <omp.h>

namespace gofperm {

std::string to_string(Statistic s) { return s == Statistic::KS ? "ks" : "cvm"; }

double permutation_p_value(double observed, std::span<const double> replicates) noexcept {
    const double threshold = observed - kTieRelativeTolerance * std::abs(observed);
    std::size_t hits = 0;
    for (double t : replicates) hits += (t >= threshold) ? 1 : 0;
    return static_cast<double>(hits + 1) / static_cast<double>(replicates.size() + 1);
}

double exhaustive_p_value(double observed, std::span<const double> replicates) noexcept {
    const double threshold = observed - kTieRelativeTolerance * std::abs(observed);
    std::size_t hits = 0;
    for (double t : replicates) hits += (t >= threshold) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

void set_worker_count(int workers) {
    if (workers > 0) omp_set_num_threads(workers);
}

int worker_count() { return omp_get_max_threads(); }

namespace {

// Read-only state shared by all replicate evaluations of one test.
struct ReplicateContext {
    const Dataset& data;
    const TestSpec& spec;
    const FitResult& fit;
    const OlsDecomposition& qr;
    FixedOrdering fixed;  // set when keys do not depend on the replicate fit
};

struct Worker {
    FitWorkspace ws;
    ProcessScratch process;
    OutcomeScratch outcome_scratch;
    std::vector<double> outcome;
    std::vector<double> keys;

    explicit Worker(std::size_t n) : outcome(n), keys(n) {}
};

ResidualProcess zero_process(std::span<const double> keys) {
    std::vector<double> zeros(keys.size(), 0.0);
    ResidualProcess proc = build_process(zeros, keys, 1.0);
    proc.sigma_used = 0.0;
    return proc;
}

// Statistics of the replicate whose outcome sits in w.outcome. When trace is
// non-null the materialized process is stored there as well.
ProcessStatistics evaluate_outcome(const ReplicateContext& ctx, Worker& w, ResidualProcess* trace) {
    ctx.qr.fit_into(w.outcome, w.ws);
    const std::span<const double> resid = as_span(w.ws.residuals);
    const bool degenerate = is_degenerate_sigma(w.ws.sigma_hat, max_abs(w.outcome));

    if (!ctx.fixed.empty()) {
        if (degenerate) {
            if (trace) *trace = zero_process(ctx.fixed.sorted_keys());
            return {};
        }
        if (trace) *trace = build_process(resid, ctx.fixed, w.ws.sigma_hat, w.process);
        return process_statistics(resid, ctx.fixed, w.ws.sigma_hat, w.process);
    }

    const auto& key = ctx.spec.ordering;
    if (key.kind == OrderingKey::Kind::FullModel) {
        std::copy(w.ws.fitted.data(), w.ws.fitted.data() + w.ws.fitted.size(), w.keys.begin());
    } else {
        partial_predictor(ctx.data.x(), as_span(w.ws.theta), key.columns, w.keys);
    }
    if (degenerate) {
        if (trace) *trace = zero_process(w.keys);
        return {};
    }
    if (trace) *trace = build_process(resid, w.keys, w.ws.sigma_hat);
    return process_statistics(resid, w.keys, w.ws.sigma_hat, w.process);
}

ProcessStatistics evaluate_replicate(const ReplicateContext& ctx, std::size_t k, Worker& w,
                                     ResidualProcess* trace) {
    ReplicateStream stream(ctx.spec.master_seed, k);
    generate_outcome(ctx.spec.method, ctx.data, ctx.fit, stream, w.outcome_scratch, w.outcome);
    return evaluate_outcome(ctx, w, trace);
}

void run_replicates_serial(const ReplicateContext& ctx, GofTestResult& out) {
    Worker w(ctx.data.n());
    const std::size_t traces = out.replicate_traces.size();
    for (std::size_t k = 1; k <= ctx.spec.n_perms; ++k) {
        ResidualProcess* trace = k <= traces ? &out.replicate_traces[k - 1] : nullptr;
        const ProcessStatistics st = evaluate_replicate(ctx, k, w, trace);
        out.ks.replicates[k - 1] = st.ks;
        out.cvm.replicates[k - 1] = st.cvm;
    }
}

void run_replicates_parallel(const ReplicateContext& ctx, GofTestResult& out) {
    const auto count = static_cast<std::int64_t>(ctx.spec.n_perms);
    const std::size_t traces = out.replicate_traces.size();
    std::exception_ptr failure;
#pragma omp parallel
    {
        Worker w(ctx.data.n());
#pragma omp for schedule(static)
        for (std::int64_t idx = 0; idx < count; ++idx) {
            const auto k = static_cast<std::size_t>(idx) + 1;
            try {
                ResidualProcess* trace = k <= traces ? &out.replicate_traces[k - 1] : nullptr;
                const ProcessStatistics st = evaluate_replicate(ctx, k, w, trace);
                out.ks.replicates[k - 1] = st.ks;
                out.cvm.replicates[k - 1] = st.cvm;
            } catch (...) {
#pragma omp critical(gofperm_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> observed_keys(const Dataset& data, const FitResult& fit, const OrderingKey& key) {
    return ordering_values(fit, data, key);
}

// Fit, validate, and compute the observed process and statistics.
GofTestResult prepare(const Dataset& data, const TestSpec& spec, const OlsDecomposition& qr,
                      std::vector<double>& keys) {
    validate_ordering(spec.ordering, data.p());
    GofTestResult result;
    result.spec = spec;
    result.observed_fit = qr.fit(data.y());
    const FitResult& fit = result.observed_fit;
    if (is_degenerate_sigma(fit.sigma_hat, max_abs(as_span(data.y())))) {
        throw Error(ErrorKind::DegenerateVariance,
                    "the model fits the data exactly (sigma_hat = 0); the residual process is undefined");
    }
    keys = observed_keys(data, fit, spec.ordering);
    result.observed_process = build_process(as_span(fit.residuals), keys, fit.sigma_hat);
    return result;
}

void finish_observed(const ReplicateContext& ctx, std::span<const double> keys, GofTestResult& r) {
    ProcessScratch scratch;
    const auto resid = as_span(ctx.fit.residuals);
    const ProcessStatistics st = ctx.fixed.empty()
                                     ? process_statistics(resid, keys, ctx.fit.sigma_hat, scratch)
                                     : process_statistics(resid, ctx.fixed, ctx.fit.sigma_hat, scratch);
    r.ks.observed = st.ks;
    r.cvm.observed = st.cvm;
}

}  // namespace

GofTestResult run_test(const Dataset& data, const TestSpec& spec, Execution exec) {
    if (spec.n_perms < 1) throw Error(ErrorKind::InvalidArgument, "number of replicates must be >= 1");
    if (spec.collect_traces > spec.n_perms) {
        throw Error(ErrorKind::InvalidArgument, "cannot retain more traces than replicates");
    }
    const OlsDecomposition qr(data.x());
    std::vector<double> keys;
    GofTestResult result = prepare(data, spec, qr, keys);

    ReplicateContext ctx{data, result.spec, result.observed_fit, qr, {}};
    if (spec.ordering.fit_invariant() || spec.order_by_original) ctx.fixed = FixedOrdering(keys);
    finish_observed(ctx, keys, result);

    result.ks.replicates.assign(spec.n_perms, 0.0);
    result.cvm.replicates.assign(spec.n_perms, 0.0);
    result.replicate_traces.resize(spec.collect_traces);
    if (exec == Execution::Parallel) {
        run_replicates_parallel(ctx, result);
    } else {
        run_replicates_serial(ctx, result);
    }
    for (StatisticOutcome* o : {&result.ks, &result.cvm}) {
        o->p_value = permutation_p_value(o->observed, o->replicates);
    }
    return result;
}

GofTestResult exhaustive_test(const Dataset& data, const TestSpec& spec) {
    if (data.n() > kMaxExhaustiveN) {
        throw Error(ErrorKind::TooLarge, "exhaustive enumeration needs n <= " +
                                             std::to_string(kMaxExhaustiveN) + ", got n=" +
                                             std::to_string(data.n()));
    }
    if (spec.method.kind != NullMethod::Kind::PermuteResiduals) {
        throw Error(ErrorKind::InvalidArgument, "exhaustive enumeration requires permutation of residuals");
    }
    const OlsDecomposition qr(data.x());
    std::vector<double> keys;
    GofTestResult result = prepare(data, spec, qr, keys);
    result.exhaustive = true;

    ReplicateContext ctx{data, result.spec, result.observed_fit, qr, {}};
    if (spec.ordering.fit_invariant() || spec.order_by_original) ctx.fixed = FixedOrdering(keys);
    finish_observed(ctx, keys, result);

    const std::size_t n = data.n();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Worker w(n);
    do {
        permuted_outcome_from(result.observed_fit, perm, w.outcome);
        ResidualProcess trace;
        const bool keep = result.replicate_traces.size() < spec.collect_traces;
        const ProcessStatistics st = evaluate_outcome(ctx, w, keep ? &trace : nullptr);
        if (keep) result.replicate_traces.push_back(std::move(trace));
        result.ks.replicates.push_back(st.ks);
        result.cvm.replicates.push_back(st.cvm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    result.spec.n_perms = result.ks.replicates.size();
    for (StatisticOutcome* o : {&result.ks, &result.cvm}) {
        o->p_value = exhaustive_p_value(o->observed, o->replicates);
    }
    return result;
}

std::vector<TraceRow> envelope(const GofTestResult& result) {
    if (result.replicate_traces.empty()) {
        throw Error(ErrorKind::NoTraces, "no replicate processes were retained (collect_traces = 0)");
    }
    std::vector<TraceRow> rows;
    auto append = [&](std::size_t id, const ResidualProcess& proc) {
        for (std::size_t j = 0; j < proc.size(); ++j) rows.push_back({id, proc.keys[j], proc.cum[j]});
    };
    append(0, result.observed_process);
    for (std::size_t k = 0; k < result.replicate_traces.size(); ++k) {
        append(k + 1, result.replicate_traces[k]);
    }
    return rows;
}

}  // namespace gofperm
