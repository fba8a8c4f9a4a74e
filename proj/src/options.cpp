#include "bqmc/options.hpp"

#include <cmath>

#include "bqmc/error.hpp"

namespace bqmc {

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::Call: return "call";
        case PayoffKind::Put: return "put";
        case PayoffKind::AsianCall: return "asian_call";
    }
    return "?";
}

PayoffKind parse_payoff_kind(const std::string& text) {
    if (text == "call") return PayoffKind::Call;
    if (text == "put") return PayoffKind::Put;
    if (text == "asian_call" || text == "asian") return PayoffKind::AsianCall;
    throw ConfigError("unknown payoff kind '" + text + "'");
}

void PayoffSpec::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw ConfigError("payoff.k must be positive");
}

std::string to_string(BarrierKind kind) {
    switch (kind) {
        case BarrierKind::None: return "none";
        case BarrierKind::UpOut: return "up_out";
        case BarrierKind::DownOut: return "down_out";
        case BarrierKind::UpIn: return "up_in";
        case BarrierKind::DownIn: return "down_in";
        case BarrierKind::UpOutDownOut: return "up_out_down_out";
        case BarrierKind::UpOutDownIn: return "up_out_down_in";
    }
    return "?";
}

BarrierKind parse_barrier_kind(const std::string& text) {
    for (auto kind : {BarrierKind::None, BarrierKind::UpOut, BarrierKind::DownOut, BarrierKind::UpIn,
                      BarrierKind::DownIn, BarrierKind::UpOutDownOut, BarrierKind::UpOutDownIn})
        if (text == to_string(kind)) return kind;
    throw ConfigError("unknown barrier kind '" + text + "'");
}

void BarrierSpec::validate(double s0) const {
    if (kind == BarrierKind::None) return;
    if (!(level > 0.0)) throw ConfigError("barrier.b1 must be positive");
    if (two_level()) {
        if (!(lower > 0.0)) throw ConfigError("barrier.b2 must be positive");
        if (!(level > lower)) throw ConfigError("barrier.b1 must exceed barrier.b2");
    }
    if ((kind == BarrierKind::UpOut || kind == BarrierKind::UpOutDownOut || kind == BarrierKind::UpOutDownIn) &&
        !(s0 < level))
        throw ConfigError("up-and-out barrier must lie above the spot");
    if (kind == BarrierKind::DownOut && !(s0 > level)) throw ConfigError("down-and-out barrier must lie below the spot");
    if (kind == BarrierKind::UpOutDownOut && !(s0 > lower))
        throw ConfigError("down-and-out barrier must lie below the spot");
}

}  // namespace bqmc
