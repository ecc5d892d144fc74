import tensorflow as tf

base = tf.ones((2, 2))


def embed(table, ids):
    return tf.nn.embedding_lookup(table, ids)


for step in range(20):
    embed(base, step)
    norm = tf.norm(base)  # expect: RNC001
