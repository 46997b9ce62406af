"""Recurrent kinematics networks: forward pass, backpropagation, weights I/O.

Two variants map a sliding window of 48-dim normalized IMU inputs to 96 pose
values (16 joints as 6D rotations), read off at the window's current frame:

* single_stage: ReLU input lift to width 256, a two-layer bidirectional LSTM
  of hidden size 256, and a linear head;
* three_stage: a cascade of three such blocks with hidden sizes 256/64/128.
  The first predicts head/wrist positions (9), the second takes the input
  plus those positions and predicts all 16 upper-body joint positions (48),
  the third takes the input plus stage-two output and predicts the 96 pose
  values.

Everything is plain numpy; gradients are hand-derived, which keeps training
self-contained and lets finite-difference checks validate every parameter
block.  Arrays are laid out time-major ``(T, B, D)``.
"""

import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError, SequenceTooShort, ShapeMismatch
from .rotations import rot6d_to_matrix

WEIGHTS_MAGIC = b"CPWT"
WEIGHTS_VERSION = 1

NUM_OUTPUT_JOINTS = 16
LEAF_DIM = 9          # head + both wrists, 3D each
JOINTS_DIM = 48       # all 16 upper-body joint positions
POSE_DIM = 96


@dataclass(frozen=True)
class NetworkConfig:
    variant: str = "three_stage"          # or "single_stage"
    hidden: tuple = (256, 64, 128)
    input_dim: int = 48
    output_dim: int = POSE_DIM
    past_frames: int = 20
    current_frames: int = 1
    future_frames: int = 5
    dtype: str = "float32"

    def __post_init__(self):
        if self.variant not in ("single_stage", "three_stage"):
            raise DataError(f"unknown variant: {self.variant}")
        want = 1 if self.variant == "single_stage" else 3
        if len(self.hidden) != want or any(h <= 0 for h in self.hidden):
            raise DataError(f"variant {self.variant} needs {want} positive hidden dims")
        if self.current_frames != 1:
            raise DataError("exactly one current frame is supported")

    @property
    def window(self):
        return self.past_frames + self.current_frames + self.future_frames

    @property
    def center(self):
        return self.past_frames

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    def stage_dims(self):
        """(input_dim, hidden, output_dim) per stage."""
        if self.variant == "single_stage":
            return [(self.input_dim, self.hidden[0], self.output_dim)]
        return [
            (self.input_dim, self.hidden[0], LEAF_DIM),
            (self.input_dim + LEAF_DIM, self.hidden[1], JOINTS_DIM),
            (self.input_dim + JOINTS_DIM, self.hidden[2], self.output_dim),
        ]


def single_stage_config(**kw):
    kw.setdefault("hidden", (256,))
    return NetworkConfig(variant="single_stage", **kw)


@dataclass
class ModelWeights:
    params: dict                 # name -> ndarray
    config: NetworkConfig
    seed: int
    version: int = WEIGHTS_VERSION

    def copy(self):
        return ModelWeights(
            {k: v.copy() for k, v in self.params.items()},
            self.config,
            self.seed,
            self.version,
        )


def _param_specs(config):
    """Deterministic (name, shape, fan_in) list covering every parameter."""
    specs = []
    for k, (din, h, dout) in enumerate(config.stage_dims()):
        pre = f"s{k}"
        specs.append((f"{pre}.lift.W", (din, h), din))
        specs.append((f"{pre}.lift.b", (h,), None))
        for layer, lin in (("l1", h), ("l2", 2 * h)):
            for d in ("f", "b"):
                specs.append((f"{pre}.{layer}.{d}.Wx", (lin, 4 * h), lin))
                specs.append((f"{pre}.{layer}.{d}.Wh", (h, 4 * h), h))
                specs.append((f"{pre}.{layer}.{d}.b", (4 * h,), None))
        specs.append((f"{pre}.head.W", (2 * h, dout), 2 * h))
        specs.append((f"{pre}.head.b", (dout,), None))
    return specs


def init_weights(config, seed):
    """Uniform fan-in initialization; forget-gate biases start at 1."""
    rng = np.random.default_rng(seed)
    dtype = config.np_dtype
    params = {}
    for name, shape, fan_in in _param_specs(config):
        if fan_in is None:
            arr = np.zeros(shape, dtype=dtype)
            if name.endswith(".b") and ".l" in name:
                h = shape[0] // 4
                arr[h : 2 * h] = 1.0
        else:
            limit = 1.0 / np.sqrt(fan_in)
            arr = rng.uniform(-limit, limit, shape).astype(dtype)
        params[name] = arr
    return ModelWeights(params, config, seed)


def _sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def _lstm_dir(params, prefix, x, reverse):
    """One LSTM direction over (T, B, D); hidden states at original indices."""
    Wx, Wh, b = params[prefix + ".Wx"], params[prefix + ".Wh"], params[prefix + ".b"]
    T, B, D = x.shape
    H = Wh.shape[0]
    xg = (x.reshape(T * B, D) @ Wx).reshape(T, B, 4 * H) + b
    order = range(T - 1, -1, -1) if reverse else range(T)

    acts = np.empty((T, B, 4 * H), dtype=x.dtype)
    cells = np.empty((T, B, H), dtype=x.dtype)
    tanh_c = np.empty((T, B, H), dtype=x.dtype)
    hidden = np.empty((T, B, H), dtype=x.dtype)

    h = np.zeros((B, H), dtype=x.dtype)
    c = np.zeros((B, H), dtype=x.dtype)
    for t in order:
        z = xg[t] + h @ Wh
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H : 2 * H])
        g = np.tanh(z[:, 2 * H : 3 * H])
        o = _sigmoid(z[:, 3 * H :])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        acts[t, :, :H] = i
        acts[t, :, H : 2 * H] = f
        acts[t, :, 2 * H : 3 * H] = g
        acts[t, :, 3 * H :] = o
        cells[t] = c
        tanh_c[t] = tc
        hidden[t] = h
    cache = (x, acts, cells, tanh_c, hidden, reverse)
    return hidden, cache


def _lstm_dir_backward(params, prefix, cache, dhidden):
    x, acts, cells, tanh_c, hidden, reverse = cache
    Wx, Wh = params[prefix + ".Wx"], params[prefix + ".Wh"]
    T, B, D = x.shape
    H = hidden.shape[-1]
    order = list(range(T - 1, -1, -1)) if reverse else list(range(T))

    # previous hidden/cell state per step, in original index positions
    h_prev = np.zeros_like(hidden)
    c_prev = np.zeros_like(cells)
    if reverse:
        h_prev[:-1] = hidden[1:]
        c_prev[:-1] = cells[1:]
    else:
        h_prev[1:] = hidden[:-1]
        c_prev[1:] = cells[:-1]

    dgates = np.empty((T, B, 4 * H), dtype=x.dtype)
    dh_carry = np.zeros((B, H), dtype=x.dtype)
    dc_carry = np.zeros((B, H), dtype=x.dtype)
    for t in reversed(order):
        i = acts[t, :, :H]
        f = acts[t, :, H : 2 * H]
        g = acts[t, :, 2 * H : 3 * H]
        o = acts[t, :, 3 * H :]
        tc = tanh_c[t]
        dh = dhidden[t] + dh_carry
        dc = dc_carry + dh * o * (1.0 - tc * tc)
        dgates[t, :, :H] = dc * g * i * (1.0 - i)
        dgates[t, :, H : 2 * H] = dc * c_prev[t] * f * (1.0 - f)
        dgates[t, :, 2 * H : 3 * H] = dc * i * (1.0 - g * g)
        dgates[t, :, 3 * H :] = dh * tc * o * (1.0 - o)
        dh_carry = dgates[t] @ Wh.T
        dc_carry = dc * f

    flat_dg = dgates.reshape(T * B, 4 * H)
    grads = {
        prefix + ".Wx": x.reshape(T * B, D).T @ flat_dg,
        prefix + ".Wh": h_prev.reshape(T * B, H).T @ flat_dg,
        prefix + ".b": flat_dg.sum(axis=0),
    }
    dx = (flat_dg @ Wx.T).reshape(T, B, D)
    return dx, grads


def _stage_forward(params, pre, x):
    z_pre = x @ params[pre + ".lift.W"] + params[pre + ".lift.b"]
    z = np.maximum(z_pre, 0.0)
    h1f, c1f = _lstm_dir(params, pre + ".l1.f", z, reverse=False)
    h1b, c1b = _lstm_dir(params, pre + ".l1.b", z, reverse=True)
    h1 = np.concatenate([h1f, h1b], axis=-1)
    h2f, c2f = _lstm_dir(params, pre + ".l2.f", h1, reverse=False)
    h2b, c2b = _lstm_dir(params, pre + ".l2.b", h1, reverse=True)
    h2 = np.concatenate([h2f, h2b], axis=-1)
    y = h2 @ params[pre + ".head.W"] + params[pre + ".head.b"]
    cache = (x, z_pre, z, c1f, c1b, h1, c2f, c2b, h2)
    return y, cache


def _stage_backward(params, pre, cache, dy):
    x, z_pre, z, c1f, c1b, h1, c2f, c2b, h2 = cache
    T, B, _ = x.shape
    H = params[pre + ".lift.b"].shape[0]

    flat_dy = dy.reshape(T * B, -1)
    grads = {
        pre + ".head.W": h2.reshape(T * B, 2 * H).T @ flat_dy,
        pre + ".head.b": flat_dy.sum(axis=0),
    }
    dh2 = (flat_dy @ params[pre + ".head.W"].T).reshape(T, B, 2 * H)
    dh1_f, g2f = _lstm_dir_backward(params, pre + ".l2.f", c2f, dh2[..., :H])
    dh1_b, g2b = _lstm_dir_backward(params, pre + ".l2.b", c2b, dh2[..., H:])
    dh1 = dh1_f + dh1_b
    dz_f, g1f = _lstm_dir_backward(params, pre + ".l1.f", c1f, dh1[..., :H])
    dz_b, g1b = _lstm_dir_backward(params, pre + ".l1.b", c1b, dh1[..., H:])
    dz = (dz_f + dz_b) * (z_pre > 0.0)
    flat_dz = dz.reshape(T * B, H)
    grads[pre + ".lift.W"] = x.reshape(T * B, -1).T @ flat_dz
    grads[pre + ".lift.b"] = flat_dz.sum(axis=0)
    for g in (g2f, g2b, g1f, g1b):
        grads.update(g)
    dx = (flat_dz @ params[pre + ".lift.W"].T).reshape(T, B, -1)
    return dx, grads


def recurrent_forward(weights, window):
    """Hidden features of the first stage's recurrent stack for one window.

    Returns a (window, 2 * hidden) array: both LSTM directions of the second
    recurrent layer, concatenated per frame.
    """
    cfg = weights.config
    x = _check_window(window, cfg)[:, None, :].astype(cfg.np_dtype)
    _, cache = _stage_forward(weights.params, "s0", x)
    return cache[8][:, 0, :]


def net_forward(weights, x, want_caches=False):
    """All stage outputs for a (T, B, input_dim) batch of windows."""
    cfg = weights.config
    params = weights.params
    outs, caches = [], []
    stage_in = x
    for k in range(len(cfg.stage_dims())):
        y, cache = _stage_forward(params, f"s{k}", stage_in)
        outs.append(y)
        caches.append(cache)
        if k + 1 < len(cfg.stage_dims()):
            stage_in = np.concatenate([x, y], axis=-1)
    return (outs, caches) if want_caches else outs


def net_backward(weights, caches, dstage_outs):
    """Parameter gradients given per-stage output gradients (same shapes)."""
    cfg = weights.config
    params = weights.params
    n = len(cfg.stage_dims())
    grads = {}
    carry = None
    for k in reversed(range(n)):
        dy = dstage_outs[k]
        if carry is not None:
            dy = dy + carry
        dx, g = _stage_backward(params, f"s{k}", caches[k], dy)
        grads.update(g)
        # stages past the first receive [x, prev_out]; the prev_out slice
        # becomes the carry for the previous stage
        carry = dx[..., cfg.input_dim :] if k > 0 else None
    return grads


def _check_window(window, cfg):
    window = np.asarray(window)
    if window.shape != (cfg.window, cfg.input_dim):
        raise ShapeMismatch(
            f"window shape {window.shape}, expected {(cfg.window, cfg.input_dim)}"
        )
    return window


def predict_pose(weights, window):
    """96 pose values and the decoded 16 rotation matrices for one window."""
    cfg = weights.config
    x = _check_window(window, cfg)[:, None, :].astype(cfg.np_dtype)
    outs = net_forward(weights, x)
    pose6d = outs[-1][cfg.center, 0].astype(float)
    rotations = rot6d_to_matrix(pose6d.reshape(NUM_OUTPUT_JOINTS, 6))
    return pose6d, rotations


def make_windows(inputs, cfg):
    """Stack of sliding windows; window i is aligned to output frame i + past."""
    inputs = np.asarray(inputs)
    L = inputs.shape[0]
    if inputs.ndim != 2 or inputs.shape[1] != cfg.input_dim:
        raise ShapeMismatch(f"expected (T, {cfg.input_dim}) inputs, got {inputs.shape}")
    if L < cfg.window:
        raise SequenceTooShort(f"need at least {cfg.window} frames, got {L}")
    win = np.lib.stride_tricks.sliding_window_view(inputs, (cfg.window, cfg.input_dim))
    return win[:, 0].copy()


def save_weights(path, weights):
    """Versioned binary container: JSON header + little-endian float32 blobs."""
    names = sorted(weights.params)
    header = {
        "format": WEIGHTS_MAGIC.decode(),
        "version": weights.version,
        "seed": weights.seed,
        "config": asdict(weights.config),
        "params": [
            {"name": n, "shape": list(weights.params[n].shape)} for n in names
        ],
        "dtype": "<f4",
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(WEIGHTS_MAGIC)
        f.write(struct.pack("<IQ", weights.version, len(blob)))
        f.write(blob)
        for n in names:
            f.write(np.ascontiguousarray(weights.params[n], dtype="<f4").tobytes())


def load_weights(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != WEIGHTS_MAGIC:
            raise DataError(f"not a weights file: magic {magic!r}")
        version, hlen = struct.unpack("<IQ", f.read(12))
        if version != WEIGHTS_VERSION:
            raise DataError(f"unsupported weights version {version}")
        header = json.loads(f.read(hlen).decode("utf-8"))
        cfg_dict = dict(header["config"])
        cfg_dict["hidden"] = tuple(cfg_dict["hidden"])
        cfg = NetworkConfig(**cfg_dict)
        params = {}
        for spec in header["params"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(f.read(4 * count), dtype="<f4").reshape(shape)
            params[spec["name"]] = data.astype(cfg.np_dtype)
    return ModelWeights(params, cfg, header["seed"], version)
