#include "pulsepair/timebase.hpp"

#include <cmath>

#include "pulsepair/errors.hpp"

namespace pulsepair {

namespace {

double wrap24(double hours) {
  double h = std::fmod(hours, 24.0);
  if (h < 0.0) h += 24.0;
  return h;
}

}  // namespace

double gmst_hours(double mjd) {
  if (!std::isfinite(mjd)) throw DataError("gmst_hours: non-finite MJD");
  const double days_since_j2000 = mjd - 51544.5;
  return wrap24(18.697374558 + 24.06570982441908 * days_since_j2000);
}

double lst_hours(double mjd, double site_longitude_deg) {
  return wrap24(gmst_hours(mjd) + site_longitude_deg / 15.0);
}

double pointing_ra_hours(double mjd, const ObservatoryClock& clock,
                         const Pointing& pointing) {
  if (std::abs(pointing.azimuth_deg - 180.0) > 1e-9) {
    throw UsageError("pointing_ra_hours: only meridian pointing (azimuth 180) is supported");
  }
  return lst_hours(mjd, clock.site_longitude_deg);
}

int ra_bin_of(double ra_hr) {
  if (!(ra_hr >= 0.0 && ra_hr < 24.0)) {
    throw DataError("ra_bin_of: RA outside [0, 24) hours");
  }
  int bin = static_cast<int>(std::floor(ra_hr / kRaBinWidthHr));
  if (bin >= kNumRaBins) bin = kNumRaBins - 1;
  return bin;
}

double ra_bin_center_hr(int bin) {
  return (bin + 0.5) * kRaBinWidthHr;
}

}  // namespace pulsepair
