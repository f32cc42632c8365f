#pragma once

#include "latent_painter/core.hpp"
#include "latent_painter/effects.hpp"
#include "latent_painter/errors.hpp"
#include "latent_painter/frame_sink.hpp"
#include "latent_painter/frames_io.hpp"
#include "latent_painter/npy.hpp"
#include "latent_painter/painter.hpp"
#include "latent_painter/random.hpp"
#include "latent_painter/replay.hpp"
#include "latent_painter/stroke_engine.hpp"
#include "latent_painter/stroke_log.hpp"
#include "latent_painter/synthetic.hpp"
#include "latent_painter/tensor.hpp"
#include "latent_painter/transition.hpp"
