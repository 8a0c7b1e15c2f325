#pragma once

// Umbrella header for the windtwin condition-monitoring toolkit.

#include "windtwin/detect/coincidence.hpp"
#include "windtwin/detect/detector.hpp"
#include "windtwin/detect/events.hpp"
#include "windtwin/detect/thresholds.hpp"
#include "windtwin/diagnose/diagnosis.hpp"
#include "windtwin/diagnose/report.hpp"
#include "windtwin/diagnose/shapley.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/fileio.hpp"
#include "windtwin/ingest/frame.hpp"
#include "windtwin/ingest/mask.hpp"
#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/ingest/schema.hpp"
#include "windtwin/nn/adam.hpp"
#include "windtwin/nn/dense.hpp"
#include "windtwin/nn/gradients.hpp"
#include "windtwin/nn/linalg.hpp"
#include "windtwin/nn/loss.hpp"
#include "windtwin/nn/lstm.hpp"
#include "windtwin/nom/io.hpp"
#include "windtwin/nom/model.hpp"
#include "windtwin/nom/train.hpp"
#include "windtwin/rng.hpp"
#include "windtwin/service/alerts.hpp"
#include "windtwin/service/artifacts.hpp"
#include "windtwin/service/follow.hpp"
#include "windtwin/service/pipeline.hpp"
#include "windtwin/service/plots.hpp"
#include "windtwin/synth/generate.hpp"
#include "windtwin/synth/library.hpp"
#include "windtwin/synth/scenario.hpp"
#include "windtwin/time.hpp"
