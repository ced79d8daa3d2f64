#include "core/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace igchaos::ode {

namespace {

// Dormand-Prince 8(5,3) tableau, error weights and dense-output weights
// (Hairer-Wanner DOP853 with a 7th-order interpolant reusing the FSAL stage).
namespace tableau {
    constexpr double c2 = 0.05260015195876773187856;
    constexpr double c3 = 0.07890022793815159781784;
    constexpr double c4 = 0.11835034190722739672676;
    constexpr double c5 = 0.28164965809277260327324;
    constexpr double c6 = 0.33333333333333333333333;
    constexpr double c7 = 0.25000000000000000000000;
    constexpr double c8 = 0.30769230769230769230769;
    constexpr double c9 = 0.65128205128205128205128;
    constexpr double c10 = 0.60000000000000000000000;
    constexpr double c11 = 0.85714285714285714285714;
    constexpr double c12 = 1.00000000000000000000000;
    // coefficients for Runge-Kutta stages
    constexpr double a21 = 0.05260015195876773187856;
    constexpr double a31 = 0.01972505698453789945446;
    constexpr double a32 = 0.05917517095361369836338;
    constexpr double a41 = 0.02958758547680684918169;
    constexpr double a43 = 0.08876275643042054754507;
    constexpr double a51 = 0.24136513415926668550237;
    constexpr double a53 = -0.88454947932828608534486;
    constexpr double a54 = 0.92483400326179200311574;
    constexpr double a61 = 0.03703703703703703703704;
    constexpr double a64 = 0.17082860872947387127960;
    constexpr double a65 = 0.12546768756682242501669;
    constexpr double a71 = 0.03710937500000000000000;
    constexpr double a74 = 0.17025221101954403931498;
    constexpr double a75 = 0.06021653898045596068502;
    constexpr double a76 = -0.01757812500000000000000;
    constexpr double a81 = 0.03709200011850479271088;
    constexpr double a84 = 0.17038392571223999381021;
    constexpr double a85 = 0.10726203044637328465181;
    constexpr double a86 = -0.01531943774862440175279;
    constexpr double a87 = 0.00827378916381402288758;
    constexpr double a91 = 0.62411095871607571711443;
    constexpr double a94 = -3.36089262944694129406857;
    constexpr double a95 = -0.86821934684172600681819;
    constexpr double a96 = 27.5920996994467083049416;
    constexpr double a97 = 20.1540675504778934086187;
    constexpr double a98 = -43.4898841810699588477366;
    constexpr double a101 = 0.47766253643826436589043;
    constexpr double a104 = -2.48811461997166764192642;
    constexpr double a105 = -0.59029082683684299637145;
    constexpr double a106 = 21.2300514481811942347289;
    constexpr double a107 = 15.2792336328824235832597;
    constexpr double a108 = -33.2882109689848629194453;
    constexpr double a109 = -0.02033120170850862613582;
    constexpr double a111 = -0.93714243008598732571704;
    constexpr double a114 = 5.18637242884406370830024;
    constexpr double a115 = 1.09143734899672957818500;
    constexpr double a116 = -8.14978701074692612513997;
    constexpr double a117 = -18.5200656599969598641566;
    constexpr double a118 = 22.7394870993505042818970;
    constexpr double a119 = 2.49360555267965238987089;
    constexpr double a1110 = -3.04676447189821950038237;
    constexpr double a121 = 2.27331014751653820792360;
    constexpr double a124 = -10.5344954667372501984067;
    constexpr double a125 = -2.00087205822486249909676;
    constexpr double a126 = -17.9589318631187989172766;
    constexpr double a127 = 27.9488845294199600508500;
    constexpr double a128 = -2.85899827713502369474066;
    constexpr double a129 = -8.87285693353062954433549;
    constexpr double a1210 = 12.3605671757943030647266;
    constexpr double a1211 = 0.64339274601576353035597;
    // Runge-Kutta coefficients for the final stage
    constexpr double b1 = 0.05429373411656876223805;
    constexpr double b6 = 4.45031289275240888144114;
    constexpr double b7 = 1.89151789931450038304282;
    constexpr double b8 = -5.80120396001058478146721;
    constexpr double b9 = 0.31116436695781989440892;
    constexpr double b10 = -0.15216094966251607855618;
    constexpr double b11 = 0.20136540080403034837478;
    constexpr double b12 = 0.04471061572777259051769;
    // coefficients for error estimates (3rd and 5th order)
    constexpr double bhh1 = 0.24409448818897637795276;
    constexpr double bhh2 = 0.73384668828161185734136;
    constexpr double bhh3 = 0.02205882352941176470588;
    constexpr double er1 = 0.01312004499419488073250;
    constexpr double er6 = -1.22515644637620444072057;
    constexpr double er7 = -0.49575894965725019152141;
    constexpr double er8 = 1.66437718245498653696153;
    constexpr double er9 = -0.35032884874997368168865;
    constexpr double er10 = 0.33417911871301747902973;
    constexpr double er11 = 0.08192320648511571246571;
    constexpr double er12 = -0.02235530786388629525884;
    // coefficients for 7th order interpolation instead of the original 8th order
    constexpr double d41 = -5.40685903845352664250302;
    constexpr double d46 = 367.268892700041893590281;
    constexpr double d47 = 154.609958204083905482676;
    constexpr double d48 = -505.920283865412564024766;
    constexpr double d49 = 15.5975154819608130688200;
    constexpr double d410 = -26.1936204184402805956691;
    constexpr double d411 = -0.74003512364122230844721;
    constexpr double d412 = 1.11776539319431476294221;
    constexpr double d413 = -0.33333333333333333333333;
    constexpr double d51 = 6.51987095363079615048119;
    constexpr double d56 = -1066.34956011730205278592;
    constexpr double d57 = -351.864047514639508625601;
    constexpr double d58 = 1363.51955696662884408368;
    constexpr double d59 = -112.727669432657582669864;
    constexpr double d510 = 159.796191868560289612921;
    constexpr double d511 = -2.13865100308788816220259;
    constexpr double d512 = -3.75569172113289760348584;
    constexpr double d513 = 7.00000000000000000000000;
    constexpr double d61 = 10.4698004763293477204238;
    constexpr double d66 = -1380.01473607038123167155;
    constexpr double d67 = -531.219827862514074379012;
    constexpr double d68 = 1866.98964341870892451324;
    constexpr double d69 = -53.3302605020547902574560;
    constexpr double d610 = 82.4147560258671369782481;
    constexpr double d611 = 7.38443654502992069572676;
    constexpr double d612 = 0.41729908012587751149843;
    constexpr double d613 = -3.11111111111111111111111;
    constexpr double d71 = -16.6338582677165354330709;
    constexpr double d76 = 4516.16568914956011730205;
    constexpr double d77 = 1393.85185384057776465219;
    constexpr double d78 = -5687.52042419481539670071;
    constexpr double d79 = 473.965563750151263163661;
    constexpr double d710 = -661.810776942355889724311;
    constexpr double d711 = -18.0180473354013232598119;
    constexpr double d712 = 0;
    constexpr double d713 = 0;
}  // namespace tableau

constexpr double kSafety = 0.9;
constexpr double kMaxIncrease = 6.0;   // h_new <= 6 h
constexpr double kMaxDecrease = 0.333; // h_new >= 0.333 h

}  // namespace

const char* status_name(Status s) {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::StepUnderflow: return "step_underflow";
        case Status::NonFinite: return "non_finite";
        case Status::Halted: return "halted";
    }
    return "unknown";
}

Dop853::Dop853(Rhs rhs, std::size_t dim, Tolerances tol)
    : rhs_(std::move(rhs)), dim_(dim), tol_(tol), y_(dim), f_(dim), k_(12 * dim), rcont_(8 * dim),
      ynew_(dim), fnew_(dim), tmp_(dim) {
    if (dim == 0)
        throw DomainError("ODE system must have at least one component");
    if (!(tol.rel > 0.0) || !(tol.abs >= 0.0))
        throw DomainError("ODE tolerances must satisfy rel > 0 and abs >= 0");
}

void Dop853::init(double t0, std::span<const double> y0) {
    if (y0.size() != dim_)
        throw DomainError("initial state has the wrong dimension");
    std::copy(y0.begin(), y0.end(), y_.begin());
    t_ = t_prev_ = t0;
    h_ = 0.0;
    last_rejected_ = false;
    stats_ = {};
    rhs_(t_, y_, f_);
    ++stats_.evaluations;
    // constant extension until the first step is taken
    std::fill(rcont_.begin(), rcont_.end(), 0.0);
    std::copy(y_.begin(), y_.end(), rcont_.begin());
}

namespace {
constexpr double kMinScale = 1e-150;
}

double Dop853::initial_step(double t_limit) {
    const double hmax = t_limit - t_;
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        // with a vanishing absolute tolerance a zero component has no scale
        // and would swamp the heuristic; the error norm handles it later
        const double sk = tol_.abs + tol_.rel * std::abs(y_[i]);
        if (sk < kMinScale)
            continue;
        dnf += (f_[i] / sk) * (f_[i] / sk);
        dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    for (std::size_t i = 0; i < dim_; ++i)
        tmp_[i] = y_[i] + h * f_[i];
    rhs_(t_ + h, tmp_, fnew_);
    ++stats_.evaluations;
    double der2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sk = tol_.abs + tol_.rel * std::abs(y_[i]);
        if (sk < kMinScale)
            continue;
        const double d = (fnew_[i] - f_[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * std::abs(h), h1, hmax});
}

Status Dop853::step(double t_limit) {
    using namespace tableau;
    if (!(t_limit > t_))
        throw DomainError("step limit must lie ahead of the current time");
    if (h_ == 0.0)
        h_ = initial_step(t_limit);

    const std::size_t n = dim_;
    double* k1 = f_.data();
    double* k2 = &k_[1 * n];
    double* k3 = &k_[2 * n];
    double* k4 = &k_[3 * n];
    double* k5 = &k_[4 * n];
    double* k6 = &k_[5 * n];
    double* k7 = &k_[6 * n];
    double* k8 = &k_[7 * n];
    double* k9 = &k_[8 * n];
    double* k10 = &k_[9 * n];
    double* k11 = &k_[10 * n];
    double* k12 = &k_[11 * n];
    double* incr = &k_[0 * n];  // sum b_i k_i
    const double* y = y_.data();
    double* yt = tmp_.data();
    auto eval = [&](double t, double* out) {
        rhs_(t, std::span<const double>(yt, n), std::span<double>(out, n));
        ++stats_.evaluations;
    };

    int non_finite = 0;
    for (;;) {
        const double h = std::min(h_, t_limit - t_);
        if (!(h > 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t_)) ||
            !(h > std::numeric_limits<double>::min()))
            return Status::StepUnderflow;

        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        eval(t_ + c2 * h, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t_ + c3 * h, k3);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
        eval(t_ + c4 * h, k4);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t_ + c5 * h, k5);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t_ + c6 * h, k6);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval(t_ + c7 * h, k7);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        eval(t_ + c8 * h, k8);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
                                a98 * k8[i]);
        eval(t_ + c9 * h, k9);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        eval(t_ + c10 * h, k10);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        eval(t_ + c11 * h, k11);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                a1211 * k11[i]);
        eval(t_ + c12 * h, k12);
        for (std::size_t i = 0; i < n; ++i) {
            incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                      b11 * k11[i] + b12 * k12[i];
            ynew_[i] = y[i] + h * incr[i];
        }

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(ynew_[i]));
            if (sk == 0.0)
                continue;
            const double e3 = (incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) / sk;
            const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                               er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) /
                              sk;
            err3 += e3 * e3;
            err5 += e5 * e5;
        }
        const double den = std::sqrt(static_cast<double>(n) * (err5 + 0.01 * err3));
        const double err = den == 0.0 ? 0.0 : err5 * h / den;

        if (!std::isfinite(err)) {
            ++stats_.rejected;
            if (++non_finite > 50)
                return Status::NonFinite;
            h_ = 0.25 * h;
            last_rejected_ = true;
            continue;
        }

        const double fac = std::pow(err, 1.0 / 8.0);
        if (err <= 1.0) {
            for (std::size_t i = 0; i < n; ++i) yt[i] = ynew_[i];
            eval(t_ + h, fnew_.data());
            const double* k13 = fnew_.data();
            double* r1 = &rcont_[0 * n];
            double* r2 = &rcont_[1 * n];
            double* r3 = &rcont_[2 * n];
            double* r4 = &rcont_[3 * n];
            double* r5 = &rcont_[4 * n];
            double* r6 = &rcont_[5 * n];
            double* r7 = &rcont_[6 * n];
            double* r8 = &rcont_[7 * n];
            for (std::size_t i = 0; i < n; ++i) {
                r1[i] = y[i];
                const double xd = ynew_[i] - y[i];
                r2[i] = xd;
                const double xc = h * k1[i] - xd;
                r3[i] = xc;
                r4[i] = xd - h * k13[i] - xc;
                r5[i] = h * (d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] +
                             d410 * k10[i] + d411 * k11[i] + d412 * k12[i] + d413 * k13[i]);
                r6[i] = h * (d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] +
                             d510 * k10[i] + d511 * k11[i] + d512 * k12[i] + d513 * k13[i]);
                r7[i] = h * (d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] +
                             d610 * k10[i] + d611 * k11[i] + d612 * k12[i] + d613 * k13[i]);
                r8[i] = h * (d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] +
                             d710 * k10[i] + d711 * k11[i] + d712 * k12[i] + d713 * k13[i]);
            }
            std::copy(ynew_.begin(), ynew_.end(), y_.begin());
            std::copy(fnew_.begin(), fnew_.end(), f_.begin());
            t_prev_ = t_;
            t_ = (h == t_limit - t_) ? t_limit : t_ + h;
            ++stats_.accepted;
            stats_.max_error_estimate = std::max(stats_.max_error_estimate, err);
            double grow = std::min(kMaxIncrease, kSafety / std::max(fac, 1e-12));
            if (last_rejected_)
                grow = std::min(grow, 1.0);
            h_ = h * grow;
            last_rejected_ = false;
            return Status::Ok;
        }
        ++stats_.rejected;
        last_rejected_ = true;
        h_ = h * std::max(kMaxDecrease, kSafety / fac);
    }
}

void Dop853::dense(double t, std::span<double> out) const {
    if (out.size() != dim_)
        throw DomainError("dense output buffer has the wrong dimension");
    const std::size_t n = dim_;
    if (t == t_) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    const double span_len = t_ - t_prev_;
    if (span_len == 0.0) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    const double p = (t - t_prev_) / span_len;
    const double q = 1.0 - p;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = rcont_[i] +
                 p * (rcont_[n + i] +
                      q * (rcont_[2 * n + i] +
                           p * (rcont_[3 * n + i] +
                                q * (rcont_[4 * n + i] +
                                     p * (rcont_[5 * n + i] +
                                          q * (rcont_[6 * n + i] + p * rcont_[7 * n + i]))))));
    }
}

Trajectory integrate(const Rhs& rhs, std::span<const double> y0, std::span<const double> sample_times,
                     Tolerances tol, const StepGuard& guard) {
    if (sample_times.empty())
        throw DomainError("integration needs at least one sample time");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw DomainError("sample times must be strictly increasing");

    Trajectory out;
    Dop853 solver(rhs, y0.size(), tol);
    solver.init(sample_times.front(), y0);
    out.times.push_back(sample_times.front());
    out.states.emplace_back(y0.begin(), y0.end());

    std::size_t next = 1;
    const double t_end = sample_times.back();
    std::vector<double> buf(y0.size());
    while (next < sample_times.size()) {
        const Status s = solver.step(t_end);
        if (s != Status::Ok) {
            out.status = s;
            out.message = std::string("integration stopped at t = ") + std::to_string(solver.time()) +
                          ": " + status_name(s);
            break;
        }
        bool finite = true;
        for (double v : solver.state())
            finite = finite && std::isfinite(v);
        if (!finite) {
            out.status = Status::NonFinite;
            out.message = "state became non-finite at t = " + std::to_string(solver.time());
            break;
        }
        while (next < sample_times.size() && sample_times[next] <= solver.time()) {
            solver.dense(sample_times[next], buf);
            out.times.push_back(sample_times[next]);
            out.states.push_back(buf);
            ++next;
        }
        if (guard) {
            auto why = guard(solver.time(), solver.state());
            if (!why.empty()) {
                out.status = Status::Halted;
                out.message = std::move(why);
                break;
            }
        }
    }
    out.stats = solver.stats();
    return out;
}

}  // namespace igchaos::ode
