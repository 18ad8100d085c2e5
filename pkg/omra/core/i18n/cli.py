"""CLI 文案，按 LANG 环境变量选 zh / en。"""

# key -> zh / en
CLI_MESSAGES = {
    "zh": {
        "cli_help": "omra: 在线运动分辨率自适应的分层 B 帧编解码器",
        "opt_verbose": "打印调试日志（逐帧候选代价）",
        "opt_config": "配置文件路径（未指定时使用 OMRA_CONFIG 或 ~/.config/omra/config.yaml）",
        "opt_input": "输入序列：png 目录或 raw 文件",
        "opt_format": "序列格式：png_dir 或 raw_rgb24",
        "opt_width": "画面宽度（像素）",
        "opt_height": "画面高度（像素）",
        "opt_frames": "帧数（需满足 帧数−1 为 intra period 的倍数）",
        "opt_intra_period": "帧内刷新周期（2、4、…、64）",
        "opt_q_base": "基础量化步长",
        "opt_q_base_list": "逗号分隔的 q_base 工作点",
        "opt_lambda": "显式 λ（默认 lambda_scale·q_base²）",
        "opt_variant": "编码变体：omra、a、b 或 fixed:S",
        "opt_variants": "逗号分隔的多个变体，每个输出一条曲线",
        "opt_scales": "候选下采样因子，逗号分隔",
        "opt_preset": "光流估计器预设：spy 或 pwc",
        "opt_workers": "并行评估候选 s 的线程数",
        "opt_out": "输出路径",
        "opt_report": "逐帧报告 CSV 路径",
        "opt_svg": "同时输出 SVG 折线图",
        "opt_stream": "码流文件",
        "opt_from_stream": "直接从码流统计（不重新编码）",
        "opt_anchor": "锚点 RD 曲线 CSV",
        "opt_test": "待比较的 RD 曲线 CSV（可重复）",
        "opt_compare_fixed": "同时以 fixed:1 编码并比较耗时",
        "opt_velocity": "每帧位移 vx,vy（像素）",
        "opt_seed": "纹理随机种子",
        "opt_noise": "加性高斯噪声标准差",
        "opt_motion": "运动类型：pan_wrap 或 static",
        "opt_frame_index": "显示序号（B 帧）",
        "opt_scale": "下采样因子 s",
        "encode_help": "编码序列，输出码流与可选的逐帧报告。",
        "decode_help": "解码码流并写出重建序列。",
        "rd_sweep_help": "在多个 q_base 上编码，输出 psnr,bpp RD 曲线 CSV。",
        "bd_rate_help": "计算 BD-rate（及 BD-PSNR）。",
        "profile_help": "逐帧 PSNR / 码率 / 所选 s 报告，含编码耗时。",
        "scale_hist_help": "按 GOP 内位置统计各 s 的相对频率。",
        "synth_help": "生成确定性的合成测试序列。",
        "plan_help": "输出 GOP 预测结构（编码顺序、参考帧、时间层级）。",
        "flow_dump_help": "估计某 B 帧到两参考帧的光流并以二进制写出。",
        "predictor_help": "写出某 B 帧在给定 s 下的时域预测帧与两路 warp 结果（PNG）。",
        "config_help": "读写配置文件（YAML/JSON）。",
        "config_path_help": "打印配置文件路径（当前或默认）。",
        "config_get_help": "显示整个配置或指定键的值。",
        "config_set_help": "设置键值并写回配置文件。",
        "encode_done": "已编码 {frames} 帧：{bits} bits，{bpp:.4f} bpp，PSNR {psnr:.3f} dB → {path}",
        "decode_done": "已解码 {frames} 帧 → {path}",
        "report_written": "报告已写入：{path}",
        "curve_written": "{label}：RD 曲线已写入 {path}",
        "plot_written": "图已写入：{path}",
        "bd_rate_line": "{test} 相对 {anchor}：BD-rate {rate:+.3f}%，BD-PSNR {dpsnr:+.4f} dB",
        "profile_ratio": "编码耗时：{label} {t:.2f}s，fixed:1 {t_fixed:.2f}s，比值 {ratio:.2f}",
        "synth_done": "已生成 {frames} 帧（{width}x{height}）→ {path}",
        "plan_written": "GOP 计划已写入：{path}",
        "flow_dump_done": "光流已写入：{past}，{future}",
        "predictor_done": "预测帧已写入：{path}",
        "not_b_frame": "帧 {index} 不是 B 帧",
        "config_key_missing": "配置中没有键：{key}",
        "config_saved": "已保存到 {path}",
        "err_prefix": "错误：{msg}",
    },
    "en": {
        "cli_help": "omra: hierarchical B-frame codec with online motion resolution adaptation",
        "opt_verbose": "Print debug logs (per-frame candidate costs)",
        "opt_config": "Config file path (default: OMRA_CONFIG or ~/.config/omra/config.yaml)",
        "opt_input": "Input sequence: png directory or raw file",
        "opt_format": "Sequence format: png_dir or raw_rgb24",
        "opt_width": "Frame width in pixels",
        "opt_height": "Frame height in pixels",
        "opt_frames": "Frame count (frames - 1 must be a multiple of the intra period)",
        "opt_intra_period": "Intra refresh period (2, 4, ..., 64)",
        "opt_q_base": "Base quantizer step",
        "opt_q_base_list": "Comma-separated q_base operating points",
        "opt_lambda": "Explicit lambda (default lambda_scale * q_base^2)",
        "opt_variant": "Coding variant: omra, a, b or fixed:S",
        "opt_variants": "Comma-separated variants, one curve each",
        "opt_scales": "Candidate downsampling factors, comma-separated",
        "opt_preset": "Flow estimator preset: spy or pwc",
        "opt_workers": "Threads evaluating scale candidates",
        "opt_out": "Output path",
        "opt_report": "Per-frame report CSV path",
        "opt_svg": "Also write an SVG line plot",
        "opt_stream": "Bitstream file",
        "opt_from_stream": "Read statistics from the bitstream (no re-encode)",
        "opt_anchor": "Anchor RD curve CSV",
        "opt_test": "RD curve CSV to compare (repeatable)",
        "opt_compare_fixed": "Also encode with fixed:1 and compare wall-clock",
        "opt_velocity": "Per-frame displacement vx,vy in pixels",
        "opt_seed": "Texture random seed",
        "opt_noise": "Additive Gaussian noise sigma",
        "opt_motion": "Motion kind: pan_wrap or static",
        "opt_frame_index": "Display index (B frame)",
        "opt_scale": "Downsampling factor s",
        "encode_help": "Encode a sequence into a bitstream, with an optional per-frame report.",
        "decode_help": "Decode a bitstream and write the reconstructed sequence.",
        "rd_sweep_help": "Encode at several q_base values and write a psnr,bpp RD curve CSV.",
        "bd_rate_help": "Compute BD-rate (and BD-PSNR) between RD curves.",
        "profile_help": "Per-frame PSNR / rate / chosen-s report with encode timing.",
        "scale_hist_help": "Relative frequency of each s per position within the GOP.",
        "synth_help": "Generate a deterministic synthetic test sequence.",
        "plan_help": "Write the GOP prediction structure (coding order, references, temporal levels).",
        "flow_dump_help": "Estimate flows from a B frame to its two references and write them as binary dumps.",
        "predictor_help": "Write the temporal predictor and both warped references of a B frame at scale s (PNG).",
        "config_help": "Read or write the config file (YAML/JSON).",
        "config_path_help": "Print config file path (current or default).",
        "config_get_help": "Show the whole config or the value at a key.",
        "config_set_help": "Set a key and save the config file.",
        "encode_done": "Encoded {frames} frames: {bits} bits, {bpp:.4f} bpp, PSNR {psnr:.3f} dB -> {path}",
        "decode_done": "Decoded {frames} frames -> {path}",
        "report_written": "Report written: {path}",
        "curve_written": "{label}: RD curve written to {path}",
        "plot_written": "Plot written: {path}",
        "bd_rate_line": "{test} vs {anchor}: BD-rate {rate:+.3f}%, BD-PSNR {dpsnr:+.4f} dB",
        "profile_ratio": "Encode time: {label} {t:.2f}s, fixed:1 {t_fixed:.2f}s, ratio {ratio:.2f}",
        "synth_done": "Generated {frames} frames ({width}x{height}) -> {path}",
        "plan_written": "GOP plan written: {path}",
        "flow_dump_done": "Flows written: {past}, {future}",
        "predictor_done": "Predictor written: {path}",
        "not_b_frame": "frame {index} is not a B frame",
        "config_key_missing": "No such key in config: {key}",
        "config_saved": "Saved to {path}",
        "err_prefix": "error: {msg}",
    },
}
