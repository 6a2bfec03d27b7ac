"""
Simulated RMHC against the Markov-chain expectation
===================================================

Run the hill climber many times at n = 10 and compare the average number of
evaluations with the exact expectation. 2 000 trials per row keeps this quick;
raise ``trials`` to 10 000 for a tighter comparison.
"""

from noisyonemax import Genome, PolicyConfig, RngStream, run_noisy
from noisyonemax.harness import table_config, validate_table

# A single run, with its fitness trajectory.
res = run_noisy(10, Genome.zeros(10), PolicyConfig(r=2, sigma=1.0), RngStream(7), record_trajectory=True)
print(f"solved={res.solved} evaluations={res.evaluations_used} generations={res.generations}")
print("true fitness over the first 20 generations:", [f for _, f in res.trajectory[:21]])

# Theory vs simulation for the usual r values.
table = validate_table(table_config(trials=2000, master_seed=1), tolerance=0.05)
print(table.format())
print("all rows within 5 %:", table.ok)
