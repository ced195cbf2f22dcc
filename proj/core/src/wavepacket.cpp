#include "atomflux/wavepacket.hpp"

#include <algorithm>
#include <cmath>

#include "atomflux/constants.hpp"
#include "atomflux/errors.hpp"
#include "atomflux/parallel.hpp"
#include "quadrature.hpp"

namespace atomflux {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;
constexpr cplx I{0.0, 1.0};

// Gaussian tails beyond this many widths carry less than e^{-72} of the density.
constexpr double support_widths = 12.0;

// e^{i k x} for a wavenumber on the decaying branch (purely real or purely imaginary).
inline cplx branch_exp(cplx k, double x) {
    if (k.imag() == 0.0) return std::polar(1.0, k.real() * x);
    return {std::exp(-k.imag() * x), 0.0};
}

// Walks e^{i(k_j y - alpha k_j^2)} over a uniform grid k_j = k_lo + j dk by complex
// multiplication, re-seeding from sincos every few nodes to keep rounding drift small.
class PhaseWalk {
public:
    PhaseWalk(double k_lo, double dk, double y, double alpha)
        : a_(k_lo * y - alpha * k_lo * k_lo),
          b_(dk * y - 2.0 * alpha * k_lo * dk),
          c_(-alpha * dk * dk),
          curve_(std::polar(1.0, 2.0 * c_)) {}

    // Must be called with j = 0, 1, 2, ... in order.
    cplx next(std::size_t j) {
        if (j % reseed == 0) {
            const double jd = static_cast<double>(j);
            value_ = std::polar(1.0, a_ + jd * (b_ + c_ * jd));
            step_ = std::polar(1.0, b_ + c_ * (2.0 * jd + 1.0));
        }
        const cplx out = value_;
        value_ *= step_;
        step_ *= curve_;
        return out;
    }

private:
    static constexpr std::size_t reseed = 32;
    double a_, b_, c_;
    cplx curve_;
    cplx value_{}, step_{};
};

}  // namespace

PacketSpec PacketSpec::from_velocity(double mass, double v0, double sigma0, double x0) {
    return PacketSpec{mass * v0 / hbar, sigma0, x0};
}

void PacketSpec::validate() const {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw InvalidArgument("sigma0 must be positive");
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw InvalidArgument("k0 must be positive");
    if (!(x0 < 0.0)) throw InvalidArgument("packet must start left of the field (x0 < 0)");
    if (k0 * sigma0 <= 10.0) {
        throw InvalidArgument("k0 must exceed 20 spectral widths (k0 sigma0 > 10)");
    }
}

SpectralPacket::SpectralPacket(const FieldSetup& setup, const PacketSpec& spec,
                               const PacketOptions& options)
    : setup_(setup), spec_(spec), options_(options) {
    setup_.validate();
    spec_.validate();
    if (options_.n_nodes < 2) throw InvalidArgument("spectral grid needs at least two nodes");
    if (!(options_.span > 0.0)) throw InvalidArgument("spectral span must be positive");

    const double half = options_.span * spec_.spectral_width();
    const double k_lo = spec_.k0 - half;
    const double k_hi = spec_.k0 + half;
    if (!(k_lo > 0.0)) throw InvalidArgument("spectral grid reaches k <= 0");

    if (setup_.coupled()) dressed_ = dressed_decomposition(setup_);
    degenerate_q_ = setup_.detuning == 0.0;

    const std::size_t n = options_.n_nodes;
    dk_ = (k_hi - k_lo) / static_cast<double>(n - 1);
    nodes_.resize(n);
    const double amplitude = std::pow(2.0 * spec_.sigma0 * spec_.sigma0 / pi, 0.25);
    const double s2 = spec_.sigma0 * spec_.sigma0;

    parallel_for(n, [&](std::size_t j) {
        Node& node = nodes_[j];
        node.k = (j + 1 == n) ? k_hi : k_lo + dk_ * static_cast<double>(j);
        const double trap = (j == 0 || j + 1 == n) ? 0.5 * dk_ : dk_;
        const double dev = node.k - spec_.k0;
        const double gauss = amplitude * std::exp(-s2 * dev * dev);
        node.probability = gauss * gauss * trap;
        node.weight = std::polar(gauss * trap * inv_sqrt_2pi, -node.k * spec_.x0);
        node.sol = solve_matching(setup_, node.k);
        node.omega = node.sol.energy / hbar;
        node.exit_plus = std::exp(I * node.sol.k_plus * setup_.length);
        node.exit_minus = std::exp(I * node.sol.k_minus * setup_.length);
    });

    const ScatteringSolution& top = nodes_.back().sol;
    const double k_out = std::max(top.k, top.q.real());
    exterior_speed_ = hbar * k_out / setup_.mass;
    max_speed_ = hbar * std::max({k_out, top.k_plus.real(), top.k_minus.real()}) / setup_.mass;
}

PacketValue SpectralPacket::psi(double x, double t) const {
    return psi(x, t, region_of(setup_, x));
}

PacketValue SpectralPacket::psi(double x, double t, Region piece) const {
    cplx p1{}, p2{}, d1{}, d2{};
    const double l = setup_.length;
    const double k_lo = nodes_.front().k;
    const double alpha = hbar * t / (2.0 * setup_.mass);
    const std::size_t n = nodes_.size();

    // e^{i(k_j y - omega_j t)} along the uniform grid, and the bare time factor.
    PhaseWalk wave_in(k_lo, dk_, x, alpha);
    PhaseWalk clock(k_lo, dk_, 0.0, alpha);

    if (!setup_.coupled()) {
        for (std::size_t j = 0; j < n; ++j) {
            const Node& nd = nodes_[j];
            const cplx a = nd.weight * wave_in.next(j);
            p1 += a;
            d1 += nd.k * a;
        }
        return {p1, p2, I * d1, d2};
    }

    switch (piece) {
        case Region::left: {
            PhaseWalk wave_out(k_lo, dk_, -x, alpha);
            for (std::size_t j = 0; j < n; ++j) {
                const Node& nd = nodes_[j];
                const cplx ain = nd.weight * wave_in.next(j);
                const cplx out = wave_out.next(j);
                const cplx ar = nd.weight * nd.sol.r1 * out;
                p1 += ain + ar;
                d1 += nd.k * (ain - ar);
                const cplx e2 = degenerate_q_ ? out : clock.next(j) * branch_exp(-nd.sol.q, x);
                const cplx b = nd.weight * nd.sol.r2 * e2;
                p2 += b;
                d2 -= nd.sol.q * b;
            }
            break;
        }
        case Region::right: {
            PhaseWalk wave_exit(k_lo, dk_, x - l, alpha);
            for (std::size_t j = 0; j < n; ++j) {
                const Node& nd = nodes_[j];
                const cplx f = nd.weight * nd.sol.t1 * wave_in.next(j);
                p1 += f;
                d1 += nd.k * f;
                const cplx e2 = degenerate_q_ ? wave_exit.next(j)
                                              : clock.next(j) * branch_exp(nd.sol.q, x - l);
                const cplx g = nd.weight * nd.sol.t2 * e2;
                p2 += g;
                d2 += nd.sol.q * g;
            }
            break;
        }
        case Region::interior: {
            cplx fp_sum{}, dfp_sum{}, fm_sum{}, dfm_sum{};
            const auto channel = [&](cplx a, cplx ks, cplx amp_fwd, cplx amp_bwd, cplx exit,
                                     cplx& f_sum, cplx& df_sum) {
                cplx fwd, bwd;
                if (ks.imag() == 0.0) {
                    const cplx e = std::polar(1.0, ks.real() * x);
                    fwd = amp_fwd * e;
                    bwd = amp_bwd * std::conj(e) * exit;
                } else {
                    fwd = amp_fwd * std::exp(-ks.imag() * x);
                    bwd = amp_bwd * std::exp(ks.imag() * (x - l));
                }
                f_sum += a * (fwd + bwd);
                df_sum += a * ks * (fwd - bwd);
            };
            for (std::size_t j = 0; j < n; ++j) {
                const Node& nd = nodes_[j];
                const cplx a = nd.weight * clock.next(j);
                channel(a, nd.sol.k_plus, nd.sol.a_plus, nd.sol.b_plus, nd.exit_plus, fp_sum,
                        dfp_sum);
                channel(a, nd.sol.k_minus, nd.sol.a_minus, nd.sol.b_minus, nd.exit_minus,
                        fm_sum, dfm_sum);
            }
            p1 = fp_sum + fm_sum;
            d1 = dfp_sum + dfm_sum;
            p2 = dressed_.c_plus * fp_sum + dressed_.c_minus * fm_sum;
            d2 = dressed_.c_plus * dfp_sum + dressed_.c_minus * dfm_sum;
            break;
        }
    }
    return {p1, p2, I * d1, I * d2};
}

std::vector<PacketValue> SpectralPacket::modes(double x) const {
    std::vector<PacketValue> out(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const Node& n = nodes_[j];
        const SpinorValue phi = stationary_state(n.sol, setup_, x);
        // stationary_state already carries 1/sqrt(2 pi).
        const cplx w = n.weight / inv_sqrt_2pi;
        out[j] = {w * phi.psi1, w * phi.psi2, w * phi.dpsi1, w * phi.dpsi2};
    }
    return out;
}

double SpectralPacket::spectral_norm() const {
    double s = 0.0;
    for (const Node& n : nodes_) s += n.probability;
    return s;
}

double SpectralPacket::free_width(double t) const {
    const double s = spec_.sigma0;
    const double r = hbar * t / (2.0 * setup_.mass * s * s);
    return s * std::sqrt(1.0 + r * r);
}

std::pair<double, double> SpectralPacket::support(double t) const {
    // Outside the field nothing moves faster than the exterior speed; a faster interior
    // crossing can advance a transmitted front by at most one field length.
    const double pad = support_widths * free_width(t);
    const double l = setup_.length;
    const double lo = std::min(spec_.x0, -exterior_speed_ * t) - pad;
    const double hi = std::max(l, spec_.x0 + exterior_speed_ * t + l) + pad;
    const double period = 2.0 * pi / dk_;
    if (hi - lo > 0.9 * period) {
        throw InvalidArgument("time " + detail::num(t) +
                              " s exceeds the alias-free window of the spectral grid");
    }
    return {lo, hi};
}

double SpectralPacket::alias_horizon() const {
    // the image of the reflected tail, one period to the right, must not reach x = l
    const double room = 2.0 * pi / dk_ - setup_.length;
    const auto reach = [&](double t) {
        return std::max(-spec_.x0, exterior_speed_ * t) + support_widths * free_width(t);
    };
    if (reach(0.0) >= room) return 0.0;
    double lo = 0.0, hi = room / exterior_speed_;
    for (int i = 0; i < 100 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reach(mid) < room ? lo : hi) = mid;
    }
    return lo;
}

SpectralPacket build_packet(const FieldSetup& setup, const PacketSpec& spec,
                            const PacketOptions& options) {
    return SpectralPacket(setup, spec, options);
}

double density(const PacketValue& v) { return std::norm(v.psi1) + std::norm(v.psi2); }

double current(const PacketValue& v, double mass) {
    return hbar / mass * (std::conj(v.psi1) * v.dpsi1 + std::conj(v.psi2) * v.dpsi2).imag();
}

double density(const SpectralPacket& packet, double x, double t) {
    return density(packet.psi(x, t));
}

double current(const SpectralPacket& packet, double x, double t) {
    return current(packet.psi(x, t), packet.setup().mass);
}

double integrate_density(const SpectralPacket& packet, double a, double b, double t, double tol) {
    if (!(b > a)) return 0.0;
    const double panel = 0.25 * packet.spec().sigma0;
    const auto r = detail::paneled_gk15([&](double x) { return density(packet, x, t); }, a, b,
                                        panel, tol);
    if (r.error > 100.0 * tol) {
        throw QuadratureFailure("density quadrature missed tolerance", r.value, r.error);
    }
    return r.value;
}

double total_norm(const SpectralPacket& packet, double t) {
    const auto [lo, hi] = packet.support(t);
    return integrate_density(packet, lo, hi, t);
}

double presence_probability(const SpectralPacket& packet, double x, double t,
                            PresenceMethod method) {
    if (t < 0.0) throw InvalidArgument("time must be non-negative");
    if (method == PresenceMethod::spatial) {
        const auto [lo, hi] = packet.support(t);
        if (x >= hi) return 0.0;
        return integrate_density(packet, std::max(x, lo), hi, t);
    }
    const double initial = presence_probability(packet, x, 0.0, PresenceMethod::spatial);
    if (t == 0.0) return initial;
    const double v0 = hbar * packet.spec().k0 / packet.setup().mass;
    const double panel = 0.25 * packet.spec().sigma0 / v0;
    const double tol = 1e-10;
    const auto r = detail::paneled_gk15([&](double s) { return current(packet, x, s); }, 0.0, t,
                                        panel, tol);
    if (r.error > 100.0 * tol) {
        throw QuadratureFailure("current quadrature missed tolerance", initial + r.value, r.error);
    }
    return initial + r.value;
}

double transmission_probability(const SpectralPacket& packet) {
    double s = 0.0;
    for (const auto& n : packet.nodes()) s += n.probability * stationary_transmission(n.sol);
    return s;
}

double reflection_probability(const SpectralPacket& packet) {
    double s = 0.0;
    for (const auto& n : packet.nodes()) s += n.probability * stationary_reflection(n.sol);
    return s;
}

}  // namespace atomflux
