#include <array>
#include <cmath>
#include <stdexcept>

#include "evcrp/gen.hpp"

namespace evcrp::gen {

namespace {

// Daily aggregate household profiles (kW, 650 households) at 15-minute
// resolution, midpoint-sampled. Identical copies ship under data/.
constexpr std::array<double, 96> kProfile1 = {
    265.4, 259.4, 254.8, 251.2, 248.5, 246.6, 245.2, 244.4,
    244.1, 244.1, 244.4, 245.1, 246.1, 247.4, 249.1, 251.1,
    253.5, 256.3, 259.5, 263.1, 267.1, 271.5, 276.2, 281.2,
    286.5, 291.9, 297.3, 302.7, 307.9, 312.9, 317.4, 321.3,
    324.7, 327.2, 329.0, 329.9, 329.9, 329.0, 327.3, 324.7,
    321.4, 317.5, 313.1, 308.4, 303.3, 298.3, 293.2, 288.5,
    284.1, 280.3, 277.2, 275.0, 273.8, 273.9, 275.5, 278.6,
    283.6, 290.6, 299.8, 311.2, 325.0, 341.3, 359.8, 380.6,
    403.3, 427.6, 453.0, 479.0, 504.7, 529.6, 552.8, 573.6,
    591.2, 605.1, 614.6, 619.4, 619.4, 614.5, 605.0, 591.1,
    573.4, 552.6, 529.3, 504.3, 478.3, 452.2, 426.5, 401.8,
    378.6, 357.2, 337.8, 320.6, 305.6, 292.7, 281.8, 272.7};

constexpr std::array<double, 96> kProfile2 = {
    273.4, 272.3, 271.5, 271.0, 270.7, 270.5, 270.4, 270.3,
    270.3, 270.4, 270.4, 270.6, 270.7, 270.9, 271.2, 271.6,
    272.0, 272.6, 273.2, 274.1, 275.1, 276.3, 277.8, 279.5,
    281.6, 284.0, 286.7, 289.9, 293.5, 297.6, 302.1, 307.2,
    312.7, 318.8, 325.3, 332.2, 339.5, 347.1, 355.0, 363.1,
    371.2, 379.4, 387.3, 395.1, 402.6, 409.6, 416.2, 422.4,
    428.0, 433.3, 438.2, 443.0, 447.8, 452.9, 458.6, 465.1,
    472.7, 481.8, 492.4, 504.9, 519.1, 534.9, 552.0, 570.1,
    588.5, 606.6, 623.4, 638.3, 650.2, 658.6, 662.7, 662.0,
    656.5, 646.0, 630.9, 611.6, 588.7, 563.1, 535.6, 507.1,
    478.6, 450.7, 424.2, 399.7, 377.3, 357.5, 340.3, 325.6,
    313.3, 303.2, 295.1, 288.7, 283.7, 279.9, 277.0, 274.9};

constexpr std::array<double, 96> kProfile3 = {
    383.4, 371.0, 359.8, 349.9, 341.4, 334.0, 327.8, 322.7,
    318.6, 315.4, 312.9, 311.2, 310.1, 309.5, 309.4, 309.8,
    310.5, 311.5, 312.9, 314.5, 316.4, 318.6, 320.9, 323.4,
    326.1, 329.0, 331.9, 334.9, 337.9, 340.9, 343.9, 346.7,
    349.4, 351.8, 354.0, 355.9, 357.5, 358.7, 359.5, 360.0,
    360.0, 359.6, 358.8, 357.6, 356.1, 354.2, 352.1, 349.8,
    347.3, 344.7, 342.1, 339.6, 337.2, 335.0, 333.2, 331.8,
    330.9, 330.7, 331.3, 332.7, 335.1, 338.6, 343.4, 349.4,
    356.8, 365.6, 375.9, 387.4, 400.3, 414.3, 429.2, 444.9,
    460.9, 476.9, 492.6, 507.5, 521.2, 533.4, 543.6, 551.6,
    557.0, 559.8, 559.8, 556.9, 551.4, 543.3, 533.0, 520.7,
    506.8, 491.7, 475.7, 459.4, 443.0, 427.0, 411.5, 396.9};

const std::array<double, 96>& profile_array(int id) {
  switch (id) {
    case 1: return kProfile1;
    case 2: return kProfile2;
    case 3: return kProfile3;
    default: throw std::invalid_argument("load profile id must be 1, 2 or 3");
  }
}

// Time-of-use tariff tiers over the day, $/kWh.
double tou_rate(double hour) {
  if (hour < 8.0) return 0.12;
  if (hour < 16.0) return 0.22;
  if (hour < 21.0) return 0.36; // peak
  return 0.22;
}

}  // namespace

LoadProfile builtin_load_profile(int id, const Horizon& horizon) {
  const auto& src = profile_array(id);
  LoadProfile out;
  out.values_kw.resize(static_cast<std::size_t>(horizon.num_slots));
  // Source samples sit at hour (i + 0.5) / 4 over a periodic day; resample
  // the target slot midpoints by linear interpolation on that circle.
  for (int t = 0; t < horizon.num_slots; ++t) {
    double hour =
        std::fmod((t + 0.5) * horizon.slot_hours, 24.0);
    if (hour < 0) hour += 24.0;
    const double pos = hour * 4.0 - 0.5; // fractional source index
    const double base = std::floor(pos);
    const double frac = pos - base;
    const int i0 = (static_cast<int>(base) % 96 + 96) % 96;
    const int i1 = (i0 + 1) % 96;
    out.values_kw[static_cast<std::size_t>(t)] =
        (1.0 - frac) * src[static_cast<std::size_t>(i0)] +
        frac * src[static_cast<std::size_t>(i1)];
  }
  return out;
}

std::vector<double> builtin_cost_profile(const Horizon& horizon) {
  std::vector<double> cost(static_cast<std::size_t>(horizon.num_slots));
  for (int t = 0; t < horizon.num_slots; ++t) {
    double hour = std::fmod((t + 0.5) * horizon.slot_hours, 24.0);
    if (hour < 0) hour += 24.0;
    cost[static_cast<std::size_t>(t)] = tou_rate(hour);
  }
  return cost;
}

}  // namespace evcrp::gen
