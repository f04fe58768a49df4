#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace jost {

using cplx = std::complex<double>;

struct Channel {
    double threshold = 0.0;
    double reduced_mass = 1.0;
    int angular_momentum = 0;
};

/// Ordered channels plus the action constant. Thresholds may coincide.
class ChannelSet {
public:
    explicit ChannelSet(std::vector<Channel> channels, double hbar = 1.0);

    std::size_t size() const { return channels_.size(); }
    const Channel& operator[](std::size_t n) const { return channels_[n]; }
    const std::vector<Channel>& channels() const { return channels_; }
    double hbar() const { return hbar_; }

    /// 2 mu_n (E - E_n) / hbar^2, the squared channel momentum. Sheet independent.
    cplx momentum_squared(std::size_t n, cplx energy) const;

    /// Energy above which every channel is open.
    double max_threshold() const;

private:
    std::vector<Channel> channels_;
    double hbar_;
};

/// One sign per channel; selects a sheet of the energy Riemann surface.
class SheetSelector {
public:
    SheetSelector() = default;
    explicit SheetSelector(std::vector<int> signs);

    /// Parses a sign string such as "+-".
    static SheetSelector parse(std::string_view text);

    std::size_t size() const { return signs_.size(); }
    int operator[](std::size_t n) const { return signs_[n]; }
    const std::vector<int>& signs() const { return signs_; }

    bool is_physical() const;
    SheetSelector flipped() const;
    std::string to_string() const;

    friend bool operator==(const SheetSelector&, const SheetSelector&) = default;

private:
    std::vector<int> signs_;
};

/// Square root with Im >= 0; on its cut (non-negative real argument) the
/// non-negative real root is returned.
cplx upper_sqrt(cplx z);

/// k_n = sign_n * upper_sqrt(2 mu_n (E - E_n) / hbar^2).
std::vector<cplx> channel_momenta(const ChannelSet& cs, cplx energy, const SheetSelector& sheet);

SheetSelector physical_sheet(const ChannelSet& cs);

/// All 2^N selectors in binary counting order (bit n set <=> sign_n = -1).
std::vector<SheetSelector> enumerate_sheets(const ChannelSet& cs);

}  // namespace jost
