#pragma once

// Everything: exact Farey geometry, flips, chords, surfaces, sound, sessions.

#include "integer.hpp"
#include "farey.hpp"
#include "tessellation.hpp"
#include "chord.hpp"
#include "surface.hpp"
#include "audio.hpp"
#include "wav.hpp"
#include "io.hpp"
#include "session.hpp"
