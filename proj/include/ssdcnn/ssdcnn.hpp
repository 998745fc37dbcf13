#pragma once

#include "ssdcnn/checkpoint.hpp"
#include "ssdcnn/eightdir.hpp"
#include "ssdcnn/error.hpp"
#include "ssdcnn/evaluate.hpp"
#include "ssdcnn/features.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/ink_io.hpp"
#include "ssdcnn/model.hpp"
#include "ssdcnn/netspec.hpp"
#include "ssdcnn/nn/adagrad.hpp"
#include "ssdcnn/nn/chain.hpp"
#include "ssdcnn/nn/layers.hpp"
#include "ssdcnn/nn/loss.hpp"
#include "ssdcnn/nn/params.hpp"
#include "ssdcnn/nn/tensor.hpp"
#include "ssdcnn/pot.hpp"
#include "ssdcnn/preprocess.hpp"
#include "ssdcnn/stroke_maps.hpp"
#include "ssdcnn/synth.hpp"
#include "ssdcnn/train.hpp"
