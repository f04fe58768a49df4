#include "jost/channels.hpp"

#include "jost/errors.hpp"

#include <algorithm>
#include <cmath>

namespace jost {

ChannelSet::ChannelSet(std::vector<Channel> channels, double hbar)
    : channels_(std::move(channels)), hbar_(hbar) {
    if (channels_.empty()) throw InvalidArgument("channel set must contain at least one channel");
    if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidArgument("hbar must be positive and finite");
    for (const auto& c : channels_) {
        if (!(c.reduced_mass > 0.0) || !std::isfinite(c.reduced_mass))
            throw InvalidArgument("reduced mass must be positive and finite");
        if (c.angular_momentum < 0) throw InvalidArgument("angular momentum must be non-negative");
        if (!std::isfinite(c.threshold)) throw InvalidArgument("threshold must be finite");
    }
}

cplx ChannelSet::momentum_squared(std::size_t n, cplx energy) const {
    const auto& c = channels_[n];
    return 2.0 * c.reduced_mass * (energy - c.threshold) / (hbar_ * hbar_);
}

double ChannelSet::max_threshold() const {
    return std::max_element(channels_.begin(), channels_.end(),
                            [](const Channel& a, const Channel& b) { return a.threshold < b.threshold; })
        ->threshold;
}

SheetSelector::SheetSelector(std::vector<int> signs) : signs_(std::move(signs)) {
    for (int s : signs_)
        if (s != 1 && s != -1) throw InvalidArgument("sheet signs must be +1 or -1");
}

SheetSelector SheetSelector::parse(std::string_view text) {
    std::vector<int> signs;
    for (char c : text) {
        if (c == '+')
            signs.push_back(1);
        else if (c == '-')
            signs.push_back(-1);
        else
            throw InvalidArgument("sheet string may only contain '+' and '-': " + std::string(text));
    }
    if (signs.empty()) throw InvalidArgument("empty sheet string");
    return SheetSelector(std::move(signs));
}

bool SheetSelector::is_physical() const {
    return std::all_of(signs_.begin(), signs_.end(), [](int s) { return s == 1; });
}

SheetSelector SheetSelector::flipped() const {
    std::vector<int> out(signs_.size());
    std::transform(signs_.begin(), signs_.end(), out.begin(), [](int s) { return -s; });
    return SheetSelector(std::move(out));
}

std::string SheetSelector::to_string() const {
    std::string out;
    for (int s : signs_) out.push_back(s > 0 ? '+' : '-');
    return out;
}

cplx upper_sqrt(cplx z) {
    if (z.imag() == 0.0) {
        if (z.real() >= 0.0) return {std::sqrt(z.real()), 0.0};
        return {0.0, std::sqrt(-z.real())};
    }
    cplx w = std::sqrt(z);
    if (w.imag() < 0.0) w = -w;
    return w;
}

std::vector<cplx> channel_momenta(const ChannelSet& cs, cplx energy, const SheetSelector& sheet) {
    if (sheet.size() != cs.size()) throw InvalidArgument("sheet selector length does not match channel count");
    std::vector<cplx> k(cs.size());
    for (std::size_t n = 0; n < cs.size(); ++n)
        k[n] = static_cast<double>(sheet[n]) * upper_sqrt(cs.momentum_squared(n, energy));
    return k;
}

SheetSelector physical_sheet(const ChannelSet& cs) {
    return SheetSelector(std::vector<int>(cs.size(), 1));
}

std::vector<SheetSelector> enumerate_sheets(const ChannelSet& cs) {
    constexpr std::size_t max_channels = 16;
    const std::size_t n = cs.size();
    if (n > max_channels) throw InvalidArgument("too many channels to enumerate sheets (limit 16)");
    std::vector<SheetSelector> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<int> signs(n);
        for (std::size_t b = 0; b < n; ++b) signs[b] = (mask >> b) & 1U ? -1 : 1;
        out.emplace_back(std::move(signs));
    }
    return out;
}

}  // namespace jost
