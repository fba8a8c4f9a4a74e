#pragma once

#include <string>

namespace bqmc {

enum class PayoffKind { Call, Put, AsianCall };

std::string to_string(PayoffKind kind);
PayoffKind parse_payoff_kind(const std::string& text);

struct PayoffSpec {
    PayoffKind kind = PayoffKind::Call;
    double strike = 100.0;

    void validate() const;
};

enum class BarrierKind { None, UpOut, DownOut, UpIn, DownIn, UpOutDownOut, UpOutDownIn };

std::string to_string(BarrierKind kind);
BarrierKind parse_barrier_kind(const std::string& text);

// Discretely monitored barrier. Single-level kinds use `level`; the combined
// kinds use `level` as the upper barrier B1 and `lower` as B2 < B1.
struct BarrierSpec {
    BarrierKind kind = BarrierKind::None;
    double level = 0.0;
    double lower = 0.0;

    void validate(double s0) const;
    bool knock_in() const { return kind == BarrierKind::UpIn || kind == BarrierKind::DownIn; }
    bool two_level() const { return kind == BarrierKind::UpOutDownOut || kind == BarrierKind::UpOutDownIn; }
};

}  // namespace bqmc
