#pragma once

namespace pulsepair {

// Sidereal hours elapsed per solar hour (GMST linear rate / 24).
inline constexpr double kSiderealRate = 24.06570982441908 / 24.0;

inline constexpr double kRaBinWidthHr = 0.1;
inline constexpr int kNumRaBins = 240;

// Observation clock: 3 s trigger ticks referenced to an MJD epoch.
struct ObservatoryClock {
  double mjd_epoch = 60284.0;       // days, UTC
  double site_longitude_deg = 0.0;  // degrees East
  double tick_interval_s = 3.0;
};

// Fixed transit-telescope pointing. Only the meridian (azimuth 180) is
// supported; declination enters the fringe geometry, not the RA bookkeeping.
struct Pointing {
  double dec_deg = -8.0;
  double azimuth_deg = 180.0;
};

// Greenwich mean sidereal time, hours in [0, 24). Linear-in-days
// approximation referenced to J2000; error is well under a second over the
// MJD ranges handled here, irrelevant at 0.1 hr RA bin width.
double gmst_hours(double mjd);

// Local sidereal time, hours in [0, 24).
double lst_hours(double mjd, double site_longitude_deg);

// RA currently on the meridian. Throws UsageError for non-meridian azimuth.
double pointing_ra_hours(double mjd, const ObservatoryClock& clock,
                         const Pointing& pointing = {});

// RA bin index, floor(ra / 0.1 hr). Bin i spans [0.1 i, 0.1 (i+1)) with
// center (i + 0.5) * 0.1; bin 52 is centered on 5.25 hr. Throws DataError
// outside [0, 24).
int ra_bin_of(double ra_hr);

double ra_bin_center_hr(int bin);

}  // namespace pulsepair
